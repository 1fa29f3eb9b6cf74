//! Finite sets of spheres compared up to a tolerance.

use crate::quat::Sphere;

/// Merges spheres closer than `tol` (single linkage) and returns the cluster means,
/// sorted by `(re, rad)`.
pub fn cluster(spheres: &[Sphere], tol: f64) -> Vec<Sphere> {
    let n = spheres.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for a in 0..n {
        for b in a + 1..n {
            if spheres[a].distance(spheres[b]) <= tol {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[rb] = ra;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Sphere>> = Default::default();
    for (i, &sp) in spheres.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(sp);
    }
    let mut out: Vec<Sphere> = groups
        .values()
        .map(|g| {
            let k = g.len() as f64;
            Sphere::new(
                g.iter().map(|s| s.re).sum::<f64>() / k,
                g.iter().map(|s| s.rad).sum::<f64>() / k,
            )
        })
        .collect();
    sort(&mut out);
    out
}

pub fn sort(spheres: &mut [Sphere]) {
    spheres.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.rad.total_cmp(&b.rad)));
}

/// Every sphere of `a` lies within `tol` of some sphere of `b`.
pub fn is_subset(a: &[Sphere], b: &[Sphere], tol: f64) -> bool {
    a.iter().all(|s| b.iter().any(|t| s.distance(*t) <= tol))
}

/// Hausdorff-style equality in `(re, rad)` coordinates.
pub fn set_eq(a: &[Sphere], b: &[Sphere], tol: f64) -> bool {
    is_subset(a, b, tol) && is_subset(b, a, tol)
}

/// Largest distance from a sphere of one set to the nearest sphere of the other.
pub fn hausdorff(a: &[Sphere], b: &[Sphere]) -> f64 {
    let one_way = |x: &[Sphere], y: &[Sphere]| {
        x.iter()
            .map(|s| {
                y.iter()
                    .map(|t| s.distance(*t))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => one_way(a, b).max(one_way(b, a)),
    }
}

/// Set difference `S ∖ {0}`.
pub fn without_origin(spheres: &[Sphere], tol: f64) -> Vec<Sphere> {
    spheres
        .iter()
        .copied()
        .filter(|s| !s.is_origin(tol))
        .collect()
}

/// Set difference `S ∖ ℍ_{p,0}`.
pub fn without_purely_imaginary(spheres: &[Sphere], tol: f64) -> Vec<Sphere> {
    spheres
        .iter()
        .copied()
        .filter(|s| !s.is_purely_imaginary(tol))
        .collect()
}

pub fn union(a: &[Sphere], b: &[Sphere], tol: f64) -> Vec<Sphere> {
    let mut all = a.to_vec();
    all.extend_from_slice(b);
    cluster(&all, tol)
}
