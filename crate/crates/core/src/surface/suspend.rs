//! Integer suspensions of permutations.
//!
//! The suspension is the polygon whose top boundary is the chain of
//! vectors `ζ_j = (1, τ_j)` in domain order and whose bottom boundary is the
//! same vectors in image order; top side `j` is glued to bottom side `j`.
//! All vertices are lattice points and all gluings are integer
//! translations, so the surface covers the unit torus branched over one
//! point. Squares are the preimages of the point `(1/2, 1/3)`: for every
//! column `c` the points `(c + 1/2, b + 1/3)` strictly inside the polygon.
//! Unit moves from these points never meet a vertex, so `h` and `v` are
//! traced exactly.

use std::collections::HashMap;

use num_rational::Ratio;
use num_traits::{One, Zero};

use super::{SquareTiledSurface, SurfaceError};
use crate::perm::Permutation;

type Q = Ratio<i64>;

struct Polygon {
    /// `tau[j]` for side `j + 1`.
    tau: Vec<i64>,
    /// Domain and image positions, 0-based: side `j + 1` sits in top column
    /// `j` and bottom column `image[j]`.
    image: Vec<usize>,
    preimage: Vec<usize>,
    top: Vec<i64>,
    bottom: Vec<i64>,
}

impl Polygon {
    fn new(pi: &Permutation, tau: Vec<i64>) -> Result<Self, SurfaceError> {
        let m = pi.len();
        if tau.len() != m {
            return Err(SurfaceError::BadSuspension("one height per side"));
        }
        let image: Vec<usize> = (1..=m).map(|j| pi.at(j) - 1).collect();
        let mut preimage = vec![0; m];
        for (j, &c) in image.iter().enumerate() {
            preimage[c] = j;
        }
        let mut top = vec![0; m + 1];
        let mut bottom = vec![0; m + 1];
        for c in 0..m {
            top[c + 1] = top[c] + tau[c];
            bottom[c + 1] = bottom[c] + tau[preimage[c]];
        }
        if (1..m).any(|c| top[c] <= 0 || bottom[c] >= 0) {
            return Err(SurfaceError::BadSuspension("top vertices must lie above, bottom below"));
        }
        Ok(Self { tau, image, preimage, top, bottom })
    }

    fn m(&self) -> usize {
        self.tau.len()
    }

    fn top_at(&self, c: usize, x: Q) -> Q {
        Q::from(self.top[c]) + Q::from(self.tau[c]) * (x - Q::from(c as i64))
    }

    fn bottom_at(&self, c: usize, x: Q) -> Q {
        Q::from(self.bottom[c]) + Q::from(self.tau[self.preimage[c]]) * (x - Q::from(c as i64))
    }

    /// Crossing the top side of column `c` at offset `u` lands on the
    /// bottom copy of the same side.
    fn through_top(&self, c: usize, u: Q) -> (usize, Q, Q) {
        let c2 = self.image[c];
        let x = Q::from(c2 as i64) + u;
        (c2, x, self.bottom_at(c2, x))
    }

    fn through_bottom(&self, c: usize, u: Q) -> (usize, Q, Q) {
        let c2 = self.preimage[c];
        let x = Q::from(c2 as i64) + u;
        (c2, x, self.top_at(c2, x))
    }

    /// Sample points in column `c`: the integers `b` with
    /// `bottom < b + 1/3 < top` at `x = c + 1/2`.
    fn rows(&self, c: usize) -> std::ops::Range<i64> {
        let x = Q::from(c as i64) + Q::new(1, 2);
        let third = Q::new(1, 3);
        let lo = (self.bottom_at(c, x) - third).floor().to_integer() + 1;
        let hi = (self.top_at(c, x) - third).ceil().to_integer();
        lo..hi
    }

    fn move_right(&self, mut c: usize, mut x: Q, y: Q) -> (usize, Q, Q) {
        let mut y = y;
        let mut rem = Q::one();
        loop {
            let left = Q::from(c as i64);
            let end = std::cmp::min(x + rem, left + Q::one());
            let tt = self.tau[c];
            let tb = self.tau[self.preimage[c]];
            if tt < 0 {
                let xi = left + (y - Q::from(self.top[c])) / Q::from(tt);
                if xi > x && xi <= end {
                    rem -= xi - x;
                    (c, x, y) = self.through_top(c, xi - left);
                    continue;
                }
            }
            if tb > 0 {
                let xi = left + (y - Q::from(self.bottom[c])) / Q::from(tb);
                if xi > x && xi <= end {
                    rem -= xi - x;
                    (c, x, y) = self.through_bottom(c, xi - left);
                    continue;
                }
            }
            rem -= end - x;
            x = end;
            if rem.is_zero() {
                return (c, x, y);
            }
            c += 1;
            debug_assert!(c < self.m());
        }
    }

    fn move_up(&self, c: usize, x: Q, y: Q) -> (usize, Q, Q) {
        let (mut c, mut x, mut y) = (c, x, y);
        let mut rem = Q::one();
        loop {
            let ceiling = self.top_at(c, x);
            if y + rem < ceiling {
                return (c, x, y + rem);
            }
            rem -= ceiling - y;
            (c, x, y) = self.through_top(c, x - Q::from(c as i64));
        }
    }
}

/// Suspension with heights `τ_j`.
pub fn suspend_with_heights(pi: &Permutation, tau: &[i64]) -> Result<SquareTiledSurface, SurfaceError> {
    if !pi.is_irreducible() {
        return Err(crate::perm::PermError::Reducible.into());
    }
    let poly = Polygon::new(pi, tau.to_vec())?;
    let m = poly.m();
    let mut offset = vec![0usize; m + 1];
    let mut index: HashMap<(usize, i64), usize> = HashMap::new();
    let mut points = Vec::new();
    for c in 0..m {
        for b in poly.rows(c) {
            index.insert((c, b), points.len());
            points.push((c, b));
        }
        offset[c + 1] = points.len();
    }
    let locate = |(c, x, y): (usize, Q, Q)| -> usize {
        debug_assert_eq!(x - Q::from(c as i64), Q::new(1, 2));
        let b = (y - Q::new(1, 3)).to_integer();
        index[&(c, b)]
    };
    let mut h = Vec::with_capacity(points.len());
    let mut v = Vec::with_capacity(points.len());
    for &(c, b) in &points {
        let x = Q::from(c as i64) + Q::new(1, 2);
        let y = Q::from(b) + Q::new(1, 3);
        h.push(locate(poly.move_right(c, x, y)) as u32);
        v.push(locate(poly.move_up(c, x, y)) as u32);
    }
    SquareTiledSurface::new(h, v)
}

/// The canonical suspension of an admissible permutation, `τ_j = π(j) − j`.
pub fn suspend(pi: &Permutation) -> Result<SquareTiledSurface, SurfaceError> {
    pi.require_admissible()?;
    let tau: Vec<i64> = (1..=pi.len()).map(|j| pi.at(j) as i64 - j as i64).collect();
    suspend_with_heights(pi, &tau)
}

/// For a standard permutation the heights `(1, 0, …, 0, −1)` give a
/// suspension whose horizontal foliation is a single cylinder.
pub fn one_cylinder_suspension(pi: &Permutation) -> Result<SquareTiledSurface, SurfaceError> {
    pi.require_admissible()?;
    if !pi.is_standard() {
        return Err(crate::perm::PermError::NotStandard.into());
    }
    let m = pi.len();
    let mut tau = vec![0; m];
    tau[0] = 1;
    tau[m - 1] = -1;
    suspend_with_heights(pi, &tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::perm_profile;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn suspension_profiles() {
        assert_eq!(suspend(&p("4 3 2 1")).unwrap().singularity_profile().stratum(), vec![2]);
        assert_eq!(suspend(&p("5 4 3 2 1")).unwrap().singularity_profile().stratum(), vec![1, 1]);
        assert_eq!(suspend(&p("6 5 4 3 2 1")).unwrap().singularity_profile().stratum(), vec![4]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(suspend(&p("1 2")), Err(SurfaceError::Perm(_))));
        assert!(matches!(suspend(&p("2 1")), Err(SurfaceError::Perm(_))));
        assert!(matches!(suspend_with_heights(&p("2 1"), &[-1, 1]), Err(SurfaceError::BadSuspension(_))));
    }

    #[test]
    fn rotation_suspension_is_a_torus() {
        let s = suspend_with_heights(&p("2 1"), &[1, -1]).unwrap();
        assert_eq!(s.genus(), 1);
    }

    #[test]
    fn area_is_square_count() {
        // doubled area of the polygon is Σ over columns of both trapezoids
        for q in Permutation::all(5).filter(|q| q.require_admissible().is_ok()) {
            let s = suspend(&q).unwrap();
            let poly = Polygon::new(&q, (1..=5).map(|j| q.at(j) as i64 - j as i64).collect()).unwrap();
            let doubled: i64 =
                (0..5).map(|c| poly.top[c] + poly.top[c + 1] - poly.bottom[c] - poly.bottom[c + 1]).sum();
            assert_eq!(2 * s.n_squares() as i64, doubled, "{q:?}");
        }
    }

    #[test]
    fn profiles_agree_with_polygon_count() {
        for m in 2..=7 {
            for q in Permutation::all(m).filter(|q| q.require_admissible().is_ok()) {
                let s = suspend(&q).unwrap();
                assert_eq!(s.singularity_profile().stratum(), perm_profile(&q).unwrap().stratum(), "{q:?}");
                assert_eq!(2 * s.genus() as usize, q.omega_rank(), "{q:?}");
            }
        }
    }

    #[test]
    fn one_cylinder_for_standard() {
        let q = p("4 3 2 1");
        let s = one_cylinder_suspension(&q).unwrap();
        assert_eq!(s.singularity_profile().stratum(), vec![2]);
        // a single horizontal cylinder of height one
        let mut t = s.h(0);
        let mut len = 1;
        while t != 0 {
            t = s.h(t);
            len += 1;
        }
        assert_eq!(len, s.n_squares());
        assert!(one_cylinder_suspension(&p("3 4 1 2")).is_err());
    }
}
