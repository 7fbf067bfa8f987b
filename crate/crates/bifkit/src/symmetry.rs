//! The sign-extended dihedral action on grid functions over the square,
//! isotropy subgroups, and equivariance checks.
//!
//! The dihedral group of the square is generated by the reflection
//! `S1(x, y) = (pi - x, y)` and the quarter turn `R(x, y) = (pi - y, x)`;
//! the sign factor acts by negating function values. On a uniform
//! cell-centered `N x N` grid every group element is an exact index
//! permutation, so all checks here are free of interpolation error.

use crate::error::{Error, Result};
use ndarray::Array2;
use std::fmt;

/// One of the eight dihedral elements, written `S1^s R^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dihedral {
    /// Whether the word contains the reflection `S1`.
    pub s: bool,
    /// Power of the quarter turn `R`, modulo 4.
    pub r: u8,
}

impl Dihedral {
    pub const IDENTITY: Dihedral = Dihedral { s: false, r: 0 };

    pub fn all() -> [Dihedral; 8] {
        let mut out = [Dihedral::IDENTITY; 8];
        let mut idx = 0;
        for &s in &[false, true] {
            for r in 0..4 {
                out[idx] = Dihedral { s, r };
                idx += 1;
            }
        }
        out
    }

    /// Composition `self * other` (apply `other` first).
    pub fn compose(self, other: Dihedral) -> Dihedral {
        // S1^a R^i . S1^b R^j = S1^(a xor b) R^(j + i') with i' = -i when b.
        let i = if other.s { (4 - self.r) % 4 } else { self.r };
        Dihedral { s: self.s ^ other.s, r: (i + other.r) % 4 }
    }

    pub fn inverse(self) -> Dihedral {
        if self.s {
            self // reflections are involutions
        } else {
            Dihedral { s: false, r: (4 - self.r) % 4 }
        }
    }

    /// Image of the point `(x, y)` under the element.
    pub fn apply_point(self, x: f64, y: f64) -> (f64, f64) {
        let pi = std::f64::consts::PI;
        let (mut px, mut py) = (x, y);
        for _ in 0..self.r {
            let (nx, ny) = (pi - py, px);
            px = nx;
            py = ny;
        }
        if self.s {
            px = pi - px;
        }
        (px, py)
    }

    /// Image of the cell index `(i, j)` on an `n x n` cell-centered grid.
    pub fn apply_index(self, i: usize, j: usize, n: usize) -> (usize, usize) {
        let (mut pi_, mut pj) = (i, j);
        for _ in 0..self.r {
            let (ni, nj) = (n - 1 - pj, pi_);
            pi_ = ni;
            pj = nj;
        }
        if self.s {
            pi_ = n - 1 - pi_;
        }
        (pi_, pj)
    }
}

impl fmt::Display for Dihedral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.s, self.r) {
            (false, 0) => write!(f, "I"),
            (false, 1) => write!(f, "R"),
            (false, r) => write!(f, "R{r}"),
            (true, 0) => write!(f, "S1"),
            (true, 1) => write!(f, "S1R"),
            (true, r) => write!(f, "S1R{r}"),
        }
    }
}

/// An element of the sign-extended group: `+delta` or `-delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub sign: i8,
    pub delta: Dihedral,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { sign: 1, delta: Dihedral::IDENTITY };

    pub fn new(sign: i8, delta: Dihedral) -> Self {
        assert!(sign == 1 || sign == -1);
        Self { sign, delta }
    }

    /// All sixteen elements, identity first.
    pub fn all() -> Vec<GroupElement> {
        let mut v: Vec<GroupElement> = Dihedral::all()
            .into_iter()
            .flat_map(|d| [GroupElement::new(1, d), GroupElement::new(-1, d)])
            .collect();
        v.sort();
        v
    }

    pub fn compose(self, other: GroupElement) -> GroupElement {
        GroupElement { sign: self.sign * other.sign, delta: self.delta.compose(other.delta) }
    }

    pub fn inverse(self) -> GroupElement {
        GroupElement { sign: self.sign, delta: self.delta.inverse() }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "-{}", self.delta)
        } else {
            write!(f, "{}", self.delta)
        }
    }
}

/// Applies `gamma` to a grid function: `(gamma u)(p) = sign * u(delta^-1 p)`.
///
/// Exact index permutation composed with a sign flip; no interpolation.
pub fn act(gamma: GroupElement, u: &Array2<f64>) -> Result<Array2<f64>> {
    let (rows, cols) = u.dim();
    if rows != cols {
        return Err(Error::UnsupportedGrid(format!("{rows} x {cols} grid is not square")));
    }
    let n = rows;
    let inv = gamma.delta.inverse();
    let sign = gamma.sign as f64;
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let (pi_, pj) = inv.apply_index(i, j, n);
            out[(i, j)] = sign * u[(pi_, pj)];
        }
    }
    Ok(out)
}

/// A subgroup of the sixteen-element group, with a canonical display name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryLabel {
    pub name: String,
    pub elements: Vec<GroupElement>,
}

impl SymmetryLabel {
    pub fn from_elements(mut elements: Vec<GroupElement>) -> Self {
        elements.sort();
        elements.dedup();
        let name = classify(&elements);
        Self { name, elements }
    }

    pub fn contains(&self, g: GroupElement) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Intersection with another element set.
    pub fn intersect(&self, other: &[GroupElement]) -> SymmetryLabel {
        let kept: Vec<GroupElement> =
            self.elements.iter().copied().filter(|g| other.contains(g)).collect();
        SymmetryLabel::from_elements(kept)
    }
}

fn d(s: bool, r: u8) -> Dihedral {
    Dihedral { s, r }
}

fn plain(delta: Dihedral) -> GroupElement {
    GroupElement::new(1, delta)
}

fn neg(delta: Dihedral) -> GroupElement {
    GroupElement::new(-1, delta)
}

/// The plain dihedral-of-the-square subgroup `D4` (no sign elements).
pub fn d4_elements() -> Vec<GroupElement> {
    Dihedral::all().into_iter().map(plain).collect()
}

/// The boundary-condition subgroup `D2 = {I, S1, R^2, S1 R^2}`.
pub fn d2_elements() -> Vec<GroupElement> {
    vec![plain(d(false, 0)), plain(d(true, 0)), plain(d(false, 2)), plain(d(true, 2))]
}

fn z2_extend(v: &[GroupElement]) -> Vec<GroupElement> {
    v.iter().flat_map(|&g| [g, GroupElement { sign: -g.sign, ..g }]).collect()
}

fn classify(sorted: &[GroupElement]) -> String {
    let as_sorted = |mut v: Vec<GroupElement>| {
        v.sort();
        v
    };
    let full = as_sorted(GroupElement::all());
    let d4 = as_sorted(d4_elements());
    let d2 = as_sorted(d2_elements());
    let z2d2 = as_sorted(z2_extend(&d2_elements()));
    let diag = as_sorted(vec![
        GroupElement::IDENTITY,
        plain(d(true, 1)),
        neg(d(false, 2)),
        neg(d(true, 3)),
    ]);
    let antidiag = as_sorted(vec![
        GroupElement::IDENTITY,
        plain(d(true, 3)),
        neg(d(false, 2)),
        neg(d(true, 1)),
    ]);
    let diag_plain = as_sorted(vec![
        GroupElement::IDENTITY,
        plain(d(true, 1)),
        plain(d(false, 2)),
        plain(d(true, 3)),
    ]);
    if sorted == full.as_slice() {
        return "Z2xD4".into();
    }
    if sorted == d4.as_slice() {
        return "D4".into();
    }
    if sorted == z2d2.as_slice() {
        return "Z2xD2".into();
    }
    if sorted == d2.as_slice() {
        return "D2".into();
    }
    if sorted == diag.as_slice() {
        return "diag".into();
    }
    if sorted == antidiag.as_slice() {
        return "antidiag".into();
    }
    if sorted == diag_plain.as_slice() {
        return "D2-diag".into();
    }
    if sorted == [GroupElement::IDENTITY] {
        return "trivial".into();
    }
    let gens: Vec<String> = sorted
        .iter()
        .filter(|g| **g != GroupElement::IDENTITY)
        .map(|g| g.to_string())
        .collect();
    format!("<{}>", gens.join(","))
}

/// The equivariance group read off the boundary conditions and the parity
/// of the nonlinearity, as a four-case table over `(odd, mu)`.
pub fn gamma_for(f_odd: bool, mu: f64) -> SymmetryLabel {
    assert!((0.0..=1.0).contains(&mu));
    let base = if mu == 1.0 { d4_elements() } else { d2_elements() };
    let elements = if f_odd { z2_extend(&base) } else { base };
    SymmetryLabel::from_elements(elements)
}

/// Result of an isotropy computation.
#[derive(Debug, Clone)]
pub struct Isotropy {
    pub label: SymmetryLabel,
    /// Set when `u` was (numerically) zero and the full group was returned.
    pub degenerate: bool,
}

/// The subgroup of elements fixing `u` up to `tol * ||u||`.
///
/// Closure is enforced: the element set is grown to the generated subgroup
/// and elements whose products fail the tolerance are discarded until it
/// stabilizes.
pub fn isotropy(u: &Array2<f64>, tol: f64) -> Result<Isotropy> {
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok(Isotropy {
            label: SymmetryLabel::from_elements(GroupElement::all()),
            degenerate: true,
        });
    }
    let mut fixing: Vec<GroupElement> = Vec::new();
    for g in GroupElement::all() {
        let gu = act(g, u)?;
        let diff = (&gu - u).iter().map(|v| v * v).sum::<f64>().sqrt();
        if diff <= tol * norm {
            fixing.push(g);
        }
    }
    // Enforce closure: intersect down to the largest subset closed under
    // composition. Exact permutations make this a no-op in practice.
    loop {
        let set = fixing.clone();
        fixing.retain(|&g| set.iter().all(|&h| set.contains(&g.compose(h))));
        if fixing.len() == set.len() {
            break;
        }
        if fixing.is_empty() {
            fixing.push(GroupElement::IDENTITY);
            break;
        }
    }
    Ok(Isotropy { label: SymmetryLabel::from_elements(fixing), degenerate: false })
}

/// Maximum relative equivariance residual `||G(gamma u) - gamma G(u)|| / ||G(u)||`
/// over `trials` pseudo-random inputs (fixed seed, deterministic).
pub fn check_equivariance<F>(apply_g: F, gamma: GroupElement, n: usize, trials: usize) -> f64
where
    F: Fn(&Array2<f64>) -> Array2<f64>,
{
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5ca1ab1e);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let u = Array2::from_shape_fn((n, n), |_| rng.gen_range(-1.0..1.0));
        let gu = act(gamma, &u).expect("square grid");
        let lhs = apply_g(&gu);
        let rhs = act(gamma, &apply_g(&u)).expect("square grid");
        let denom = rhs.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let resid = (&lhs - &rhs).iter().map(|v| v * v).sum::<f64>().sqrt() / denom;
        worst = worst.max(resid);
    }
    worst
}

/// Conjugated subgroup `gamma H gamma^-1`, used by the isotropy tests.
pub fn conjugate(label: &SymmetryLabel, gamma: GroupElement) -> SymmetryLabel {
    let elements = label
        .elements
        .iter()
        .map(|&h| gamma.compose(h).compose(gamma.inverse()))
        .collect();
    SymmetryLabel::from_elements(elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid_of<F: Fn(f64, f64) -> f64>(n: usize, f: F) -> Array2<f64> {
        let h = PI / n as f64;
        Array2::from_shape_fn((n, n), |(i, j)| {
            f((i as f64 + 0.5) * h, (j as f64 + 0.5) * h)
        })
    }

    #[test]
    fn group_axioms_hold() {
        let all = GroupElement::all();
        assert_eq!(all.len(), 16);
        // closure and associativity, exhaustively
        for &a in &all {
            for &b in &all {
                let ab = a.compose(b);
                assert!(all.contains(&ab));
                for &c in &all {
                    assert_eq!(a.compose(b.compose(c)), ab.compose(c));
                }
            }
            assert_eq!(a.compose(a.inverse()), GroupElement::IDENTITY);
        }
        // defining relations
        let r = Dihedral { s: false, r: 1 };
        let s1 = Dihedral { s: true, r: 0 };
        assert_eq!(r.compose(r).compose(r).compose(r), Dihedral::IDENTITY);
        assert_eq!(s1.compose(s1), Dihedral::IDENTITY);
        assert_eq!(s1.compose(r).compose(s1), r.inverse());
    }

    #[test]
    fn generator_point_maps() {
        let s1 = Dihedral { s: true, r: 0 };
        let r = Dihedral { s: false, r: 1 };
        let (x, y) = (0.3, 1.2);
        assert_eq!(s1.apply_point(x, y), (PI - x, y));
        assert_eq!(r.apply_point(x, y), (PI - y, x));
        // diagonal swap: S1 R
        let diag = s1.compose(r);
        let (dx, dy) = diag.apply_point(x, y);
        assert!((dx - y).abs() < 1e-15 && (dy - x).abs() < 1e-15);
    }

    #[test]
    fn act_reflects_cosine() {
        let n = 16;
        let u = grid_of(n, |x, _| x.cos());
        let s1 = GroupElement::new(1, Dihedral { s: true, r: 0 });
        let su = act(s1, &u).unwrap();
        let expected = grid_of(n, |x, _| (PI - x).cos());
        for (a, b) in su.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
        // cos(pi - x) = -cos x
        for (a, b) in su.iter().zip(u.iter()) {
            assert!((a + b).abs() < 1e-15);
        }
    }

    #[test]
    fn act_r2_reverses_both_axes() {
        let n = 8;
        let u = grid_of(n, |x, y| x + 3.0 * y);
        let r2 = GroupElement::new(1, Dihedral { s: false, r: 2 });
        let v = act(r2, &u).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(v[(i, j)], u[(n - 1 - i, n - 1 - j)]);
            }
        }
    }

    #[test]
    fn act_sign_flip() {
        let n = 8;
        let u = grid_of(n, |x, y| (x * y).sin());
        let m = GroupElement::new(-1, Dihedral::IDENTITY);
        let v = act(m, &u).unwrap();
        for (a, b) in v.iter().zip(u.iter()) {
            assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn act_is_isometry() {
        let n = 12;
        let u = grid_of(n, |x, y| (2.0 * x).cos() + 0.3 * (y).sin() * x);
        let nu = u.iter().map(|v| v * v).sum::<f64>();
        for g in GroupElement::all() {
            let gu = act(g, &u).unwrap();
            let ngu = gu.iter().map(|v| v * v).sum::<f64>();
            assert!((nu - ngu).abs() < 1e-12 * nu);
        }
    }

    #[test]
    fn non_square_grid_is_rejected() {
        let u = Array2::<f64>::zeros((4, 6));
        assert!(act(GroupElement::IDENTITY, &u).is_err());
    }

    #[test]
    fn gamma_table() {
        assert_eq!(gamma_for(true, 1.0).name, "Z2xD4");
        assert_eq!(gamma_for(false, 1.0).name, "D4");
        assert_eq!(gamma_for(true, 0.3).name, "Z2xD2");
        assert_eq!(gamma_for(false, 0.3).name, "D2");
    }

    #[test]
    fn isotropy_of_mixed_neumann_mode_is_diagonal() {
        let n = 64;
        let u = grid_of(n, |x, y| {
            2.0 / PI * (x.cos() * (2.0 * y).cos() + (2.0 * x).cos() * y.cos())
        });
        let iso = isotropy(&u, 1e-10).unwrap();
        assert!(!iso.degenerate);
        assert_eq!(iso.label.name, "diag");
        assert_eq!(iso.label.order(), 4);
        assert!(iso.label.contains(plain(d(true, 1))), "diagonal reflection fixes phi1 + phi2");
    }

    #[test]
    fn isotropy_of_difference_mode_is_antidiagonal() {
        let n = 64;
        let u = grid_of(n, |x, y| {
            2.0 / PI * (x.cos() * (2.0 * y).cos() - (2.0 * x).cos() * y.cos())
        });
        let iso = isotropy(&u, 1e-10).unwrap();
        assert_eq!(iso.label.name, "antidiag");
    }

    #[test]
    fn isotropy_of_cos_2y() {
        let n = 32;
        let u = grid_of(n, |_, y| (2.0 * y).cos());
        let iso = isotropy(&u, 1e-10).unwrap();
        // independent of x and even about y = pi/2
        assert!(iso.label.contains(plain(d(true, 0))), "S1 fixes");
        assert!(iso.label.contains(plain(d(true, 2))), "S1R2 fixes");
        assert_eq!(iso.label.name, "D2");
    }

    #[test]
    fn isotropy_of_generic_grid_is_trivial() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let u = Array2::from_shape_fn((16, 16), |_| rng.gen_range(-1.0..1.0));
        let iso = isotropy(&u, 1e-10).unwrap();
        assert_eq!(iso.label.name, "trivial");
    }

    #[test]
    fn zero_grid_is_degenerate() {
        let u = Array2::<f64>::zeros((8, 8));
        let iso = isotropy(&u, 1e-10).unwrap();
        assert!(iso.degenerate);
        assert_eq!(iso.label.order(), 16);
    }

    #[test]
    fn isotropy_conjugates_under_the_action() {
        let n = 32;
        let u = grid_of(n, |x, y| x.cos() * (2.0 * y).cos());
        let base = isotropy(&u, 1e-10).unwrap().label;
        for g in GroupElement::all() {
            let gu = act(g, &u).unwrap();
            let moved = isotropy(&gu, 1e-10).unwrap().label;
            let expected = conjugate(&base, g);
            assert_eq!(moved.elements, expected.elements, "gamma = {g}");
        }
    }
}
