//! Double-double arithmetic and a pivoted LDL^H factorization, used to
//! evaluate near-singular MMSE quadratic forms.
//!
//! The theoretical-MMSE probes compare two quantities that agree to a
//! few parts in 1e6 while the covariances involved have eigenvalue
//! tails far below f64 resolution. Plain f64 pseudo-inverses leave
//! ~1e-6 method noise on each side, which swamps the 1e-8 ordering
//! tolerances. Carrying the factorization in ~31 significant digits
//! removes that noise entirely.

use num_complex::Complex64;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = f64::mul_add(a, b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let s2 = s2 + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, other.hi);
        let p2 = p2 + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul(Dd::from_f64(q1)));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul(Dd::from_f64(q2)));
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }
}

/// Complex double-double.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    #[inline]
    pub fn from_c64(z: Complex64) -> Cdd {
        Cdd {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    #[inline]
    pub fn add(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    #[inline]
    pub fn sub(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.sub(o.re),
            im: self.im.sub(o.im),
        }
    }

    #[inline]
    pub fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    #[inline]
    pub fn conj(self) -> Cdd {
        Cdd {
            re: self.re,
            im: self.im.neg(),
        }
    }

    #[inline]
    pub fn norm_sqr(self) -> Dd {
        self.re.mul(self.re).add(self.im.mul(self.im))
    }

    #[inline]
    pub fn scale(self, s: Dd) -> Cdd {
        Cdd {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    #[inline]
    pub fn div_real(self, s: Dd) -> Cdd {
        Cdd {
            re: self.re.div(s),
            im: self.im.div(s),
        }
    }
}

/// Pivoted LDL^H factorization of a Hermitian PSD matrix in
/// double-double precision, with the rank cut where pivots fall below
/// an absolute tolerance. The tolerance must sit above the rounding
/// floor of the matrix entries, or the elimination walks into
/// noise-dominated Schur pivots.
pub(crate) struct PivotedLdl {
    n: usize,
    rank: usize,
    perm: Vec<usize>,
    /// Unit lower-triangular factor, row-major; only columns < rank used.
    l: Vec<Cdd>,
    d: Vec<Dd>,
}

impl PivotedLdl {
    /// `a` is dense row-major Hermitian `n x n`.
    #[cfg(test)]
    pub fn factor(a: &[Cdd], n: usize, tol_abs: f64) -> PivotedLdl {
        Self::factor_with_priority(a, n, tol_abs, &[], f64::MIN_POSITIVE)
    }

    /// Factor with a forced elimination prefix: the variables in
    /// `priority` are eliminated first, in order (each skipped if its
    /// conditional variance has fallen to `skip_floor`), then the
    /// elimination continues greedily until pivots drop to `tol_abs`.
    ///
    /// Forcing one factorization to consume another's selected variable
    /// set keeps two conditional variances comparable at roundoff level
    /// rather than at the level of whatever tail the cuts dropped.
    pub fn factor_with_priority(
        a: &[Cdd],
        n: usize,
        tol_abs: f64,
        priority: &[usize],
        skip_floor: f64,
    ) -> PivotedLdl {
        assert_eq!(a.len(), n * n);
        let mut w = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut d = vec![Dd::ZERO; n];
        let idx = |i: usize, j: usize| i * n + j;
        // where each original variable currently lives
        let mut location: Vec<usize> = (0..n).collect();

        let mut rank = 0usize;
        let mut forced = priority.iter().copied();
        loop {
            let step = rank;
            if step == n {
                break;
            }
            let best = loop {
                match forced.next() {
                    Some(orig) => {
                        let j = location[orig];
                        debug_assert!(j >= step, "priority variable eliminated twice");
                        if w[idx(j, j)].re.to_f64() > skip_floor {
                            break Some(j);
                        }
                        // negligible conditional variance: skip
                    }
                    None => break None,
                }
            };
            let best = match best {
                Some(j) => j,
                None => {
                    // greedy phase
                    let mut bj = step;
                    let mut bv = w[idx(step, step)].re.to_f64();
                    for j in (step + 1)..n {
                        let v = w[idx(j, j)].re.to_f64();
                        if v > bv {
                            bj = j;
                            bv = v;
                        }
                    }
                    if bv <= tol_abs {
                        break;
                    }
                    bj
                }
            };
            if best != step {
                location.swap(perm[step], perm[best]);
                perm.swap(step, best);
                for j in 0..n {
                    w.swap(idx(step, j), idx(best, j));
                }
                for i in 0..n {
                    w.swap(idx(i, step), idx(i, best));
                }
            }
            let pivot = w[idx(step, step)].re;
            d[step] = pivot;
            for i in (step + 1)..n {
                let lik = w[idx(i, step)].div_real(pivot);
                w[idx(i, step)] = lik;
            }
            // update the full trailing submatrix so the symmetric pivot
            // swap never mixes stale entries into positions still read
            for i in (step + 1)..n {
                let lik = w[idx(i, step)];
                for j in (step + 1)..n {
                    let ljk = w[idx(j, step)];
                    let upd = lik.mul(ljk.conj()).scale(pivot);
                    w[idx(i, j)] = w[idx(i, j)].sub(upd);
                }
            }
            rank += 1;
        }
        PivotedLdl {
            n,
            rank,
            perm,
            l: w,
            d,
        }
    }

    #[cfg(test)]
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Original indices of the eliminated variables, in elimination order.
    pub fn selected(&self) -> &[usize] {
        &self.perm[..self.rank]
    }

    /// Quadratic form `c^H A^+ c` restricted to the retained range:
    /// forward-substitute `z = L^{-1} P c` and sum `|z_i|^2 / d_i`.
    pub fn quad_form(&self, c: &[Cdd]) -> f64 {
        assert_eq!(c.len(), self.n);
        let idx = |i: usize, j: usize| i * self.n + j;
        let mut z = vec![Cdd::ZERO; self.rank];
        for i in 0..self.rank {
            let mut acc = c[self.perm[i]];
            for k in 0..i {
                acc = acc.sub(self.l[idx(i, k)].mul(z[k]));
            }
            z[i] = acc;
        }
        let mut q = Dd::ZERO;
        for i in 0..self.rank {
            q = q.add(z[i].norm_sqr().div(self.d[i]));
        }
        q.to_f64()
    }
}
