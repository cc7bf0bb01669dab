//! Cantor's theorem and the fixed-point property, checked by enumeration.

use std::collections::BTreeSet;
use std::fmt;

use super::{cap_check, count, ModelError};
use crate::finset::{all_functions, FinFunction, FinSet, Value};

/// `{y : t(y) = y}`.
pub fn fixed_points(t: &FinFunction) -> Result<FinSet, ModelError> {
    if t.source() != t.target() {
        return Err(ModelError::NotEndofunction);
    }
    Ok(FinSet::new(t.graph().iter().filter(|(x, y)| x == y).map(|(x, _)| x.clone())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FppReport {
    pub holds: bool,
    /// A fixed-point-free endofunction when the property fails.
    pub witness: Option<FinFunction>,
    pub endofunctions: u128,
}

/// Whether every endofunction of `y` has a fixed point.
pub fn has_fpp(y: &FinSet, cap: u128) -> Result<FppReport, ModelError> {
    let n = count(y.len(), y.len());
    cap_check(n, cap)?;
    for t in all_functions(y, y) {
        if fixed_points(&t)?.is_empty() {
            return Ok(FppReport {
                holds: false,
                witness: Some(t),
                endofunctions: n.unwrap_or(0),
            });
        }
    }
    Ok(FppReport {
        holds: true,
        witness: None,
        endofunctions: n.unwrap_or(0),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CantorReport {
    pub size: usize,
    pub functions_checked: u128,
    pub surjection_found: bool,
    /// Every function misses its own diagonal set.
    pub diagonal_always_missed: bool,
    /// The first function in enumeration order with its diagonal set.
    pub sample: Option<(Vec<Value>, Value)>,
}

impl CantorReport {
    pub fn holds(&self) -> bool {
        !self.surjection_found && self.diagonal_always_missed
    }
}

impl fmt::Display for CantorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|X| = {}: {} functions X -> P(X), surjective: {}, diagonal always missed: {}",
            self.size,
            self.functions_checked,
            if self.surjection_found { "found" } else { "none" },
            self.diagonal_always_missed
        )
    }
}

/// Enumerates every `f: X -> P(X)` and confirms none is onto; each `f` misses
/// `{x : x not in f(x)}`.
pub fn verify_cantor(x: &FinSet, cap: u128) -> Result<CantorReport, ModelError> {
    let n = x.len();
    if n >= 8 {
        return Err(ModelError::SizeCapExceeded {
            needed: u128::MAX,
            cap,
        });
    }
    let subsets = 1usize << n;
    let total = count(n, subsets);
    cap_check(total, cap)?;
    let total = total.unwrap();
    let to_set = |mask: usize| {
        Value::set(
            x.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, v)| v.clone()),
        )
    };
    let mut digits = vec![0usize; n];
    let mut seen = vec![false; subsets];
    let mut surjection_found = false;
    let mut diagonal_always_missed = true;
    let mut sample = None;
    for _ in 0..total {
        seen.iter_mut().for_each(|s| *s = false);
        let mut diagonal = 0usize;
        for (i, &m) in digits.iter().enumerate() {
            seen[m] = true;
            if m >> i & 1 == 0 {
                diagonal |= 1 << i;
            }
        }
        if seen.iter().all(|&s| s) {
            surjection_found = true;
        }
        if seen[diagonal] {
            diagonal_always_missed = false;
        }
        if sample.is_none() {
            sample = Some((digits.iter().map(|&m| to_set(m)).collect(), to_set(diagonal)));
        }
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < subsets {
                break;
            }
            *d = 0;
        }
    }
    Ok(CantorReport {
        size: n,
        functions_checked: total,
        surjection_found,
        diagonal_always_missed,
        sample,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FppTransferReport {
    pub x_size: usize,
    pub y_size: usize,
    pub maps_checked: u128,
    pub y_has_fpp: bool,
    pub surjective_curry_found: bool,
}

impl FppTransferReport {
    /// A surjective curry forces the fixed-point property on `Y`.
    pub fn consistent(&self) -> bool {
        !self.surjective_curry_found || self.y_has_fpp
    }
}

impl fmt::Display for FppTransferReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|X| = {}, |Y| = {}: {} maps X x X -> Y, Y has fpp: {}, surjective curry: {}",
            self.x_size,
            self.y_size,
            self.maps_checked,
            self.y_has_fpp,
            if self.surjective_curry_found { "found" } else { "none" }
        )
    }
}

/// Enumerates every `phi: X x X -> Y` and looks for one whose curry
/// `X -> Y^X` is onto.
pub fn verify_fpp_transfer(x: &FinSet, y: &FinSet, cap: u128) -> Result<FppTransferReport, ModelError> {
    let (nx, ny) = (x.len(), y.len());
    let fpp = has_fpp(y, cap)?;
    let cells = nx * nx;
    let total = count(cells, ny);
    cap_check(total, cap)?;
    let total = total.unwrap();
    let exp_size = count(nx, ny).and_then(|e| usize::try_from(e).ok());
    let mut found = false;
    if ny > 0 || cells == 0 {
        let exp_size = exp_size.ok_or(ModelError::SizeCapExceeded { needed: u128::MAX, cap })?;
        let mut digits = vec![0usize; cells];
        let mut images = BTreeSet::new();
        for _ in 0..total {
            images.clear();
            for row in 0..nx {
                let code = digits[row * nx..(row + 1) * nx].iter().fold(0usize, |acc, &d| acc * ny + d);
                images.insert(code);
            }
            if images.len() == exp_size {
                found = true;
                break;
            }
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < ny {
                    break;
                }
                *d = 0;
            }
        }
    }
    Ok(FppTransferReport {
        x_size: nx,
        y_size: ny,
        maps_checked: total,
        y_has_fpp: fpp.holds,
        surjective_curry_found: found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset::{omega, DEFAULT_ENUMERATION_CAP as CAP};

    #[test]
    fn fixed_point_examples() {
        let y = FinSet::range(3);
        assert_eq!(fixed_points(&FinFunction::identity(&y)).unwrap(), y);
        let not = FinFunction::from_fn(&omega(), &omega(), |v| Value::bool(!v.is_true())).unwrap();
        assert!(fixed_points(&not).unwrap().is_empty());
        let c = FinFunction::constant(&y, &y, Value::atom("2")).unwrap();
        assert_eq!(fixed_points(&c).unwrap(), FinSet::of_atoms(["2"]));
        let other = FinFunction::constant(&y, &FinSet::range(1), Value::atom("0")).unwrap();
        assert_eq!(fixed_points(&other), Err(ModelError::NotEndofunction));
    }

    #[test]
    fn fpp_by_size() {
        assert!(has_fpp(&FinSet::range(1), CAP).unwrap().holds);
        assert!(!has_fpp(&omega(), CAP).unwrap().holds);
        for n in 2..=4 {
            let r = has_fpp(&FinSet::range(n), CAP).unwrap();
            assert!(!r.holds);
            assert!(fixed_points(&r.witness.unwrap()).unwrap().is_empty());
        }
        assert!(matches!(
            has_fpp(&FinSet::range(9), CAP),
            Err(ModelError::SizeCapExceeded { .. })
        ));
    }

    #[test]
    fn cantor_small_sizes() {
        let expect = [1u128, 2, 16, 512, 65536];
        for n in 0..=4 {
            let r = verify_cantor(&FinSet::range(n), CAP).unwrap();
            assert!(r.holds(), "{r}");
            assert_eq!(r.functions_checked, expect[n]);
        }
        assert!(matches!(
            verify_cantor(&FinSet::range(5), CAP),
            Err(ModelError::SizeCapExceeded { .. })
        ));
    }

    #[test]
    fn cantor_sample_misses_its_diagonal() {
        let r = verify_cantor(&FinSet::range(2), CAP).unwrap();
        let (f, d) = r.sample.unwrap();
        assert!(!f.contains(&d));
    }

    #[test]
    fn fpp_transfer_examples() {
        let r = verify_fpp_transfer(&FinSet::range(2), &omega(), CAP).unwrap();
        assert_eq!(r.maps_checked, 16);
        assert!(!r.surjective_curry_found && r.consistent());
        let r = verify_fpp_transfer(&FinSet::range(2), &FinSet::range(1), CAP).unwrap();
        assert!(r.y_has_fpp && r.consistent());
        let r = verify_fpp_transfer(&FinSet::range(1), &FinSet::range(3), CAP).unwrap();
        assert!(!r.surjective_curry_found);
    }

    #[test]
    fn fpp_transfer_is_consistent_everywhere_small() {
        for nx in 0..=2 {
            for ny in 0..=3 {
                let r = verify_fpp_transfer(&FinSet::range(nx), &FinSet::range(ny), CAP).unwrap();
                assert!(r.consistent(), "{r}");
            }
        }
    }
}
