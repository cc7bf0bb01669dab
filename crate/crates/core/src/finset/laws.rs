//! Exhaustive checks of the topos laws on all small sets.

use std::fmt;

use super::{
    all_functions_capped, characteristic, compose, curry, curry_in, evaluation, exponent, exp_precompose, fiber, function_count,
    ensure_within, inverse_image, power_map, product, product_map, subobjects, uncurry_in, FinFunction, FinSet,
    FinsetError, Value,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawCheck {
    pub law: &'static str,
    pub instances: usize,
    pub failures: usize,
}

impl LawCheck {
    fn new(law: &'static str) -> Self {
        LawCheck {
            law,
            instances: 0,
            failures: 0,
        }
    }

    fn record(&mut self, ok: bool) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for LawCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} instances, {} failures",
            if self.passed() { "PASS" } else { "FAIL" },
            self.law,
            self.instances,
            self.failures
        )
    }
}

fn sets(max: usize) -> Vec<FinSet> {
    (0..=max).map(FinSet::range).collect()
}

/// `Sub(A)` and `Hom(A, Omega)` correspond through characteristic maps and fibers.
pub fn classifier_bijection(max: usize, cap: u128) -> Result<LawCheck, FinsetError> {
    let mut lc = LawCheck::new("classifier bijection");
    let omega = super::omega();
    for a in sets(max) {
        let subs = subobjects(&a);
        let chis: Vec<_> = all_functions_capped(&a, &omega, cap)?.collect();
        lc.record(subs.len() == chis.len());
        for p in &subs {
            lc.record(&fiber(&characteristic(p))? == p);
        }
        for chi in &chis {
            lc.record(&characteristic(&fiber(chi)?) == chi);
        }
    }
    Ok(lc)
}

/// Pulling a part back along `h: A' -> A` matches precomposing its
/// characteristic map with `h`.
pub fn classifier_naturality(max: usize, cap: u128) -> Result<LawCheck, FinsetError> {
    let mut lc = LawCheck::new("classifier naturality in A");
    for a in sets(max) {
        for a2 in sets(max) {
            for h in all_functions_capped(&a2, &a, cap)? {
                for p in subobjects(&a) {
                    let lhs = characteristic(&inverse_image(&p, &h)?);
                    let rhs = compose(&h, &characteristic(&p))?;
                    lc.record(lhs == rhs);
                }
            }
        }
    }
    Ok(lc)
}

/// `Hom(C x A, B)` and `Hom(C, B^A)` correspond through curry and uncurry,
/// and evaluation recovers the original map.
pub fn exponential_bijection(max: usize, cap: u128) -> Result<LawCheck, FinsetError> {
    let mut lc = LawCheck::new("exponential bijection");
    for c in sets(max) {
        for a in sets(max) {
            for b in sets(max) {
                let (ca, _, _) = product(&c, &a);
                let left = function_count(ca.len(), b.len());
                let exp_size = function_count(a.len(), b.len());
                ensure_within(left, cap)?;
                ensure_within(exp_size, cap)?;
                let right = exp_size.and_then(|e| function_count(c.len(), usize::try_from(e).ok()?));
                lc.record(left == right);
                let ev = evaluation(&a, &b);
                let exp = exponent(&a, &b);
                for f in all_functions_capped(&ca, &b, cap)? {
                    let g = curry_in(&f, &c, &a, &b, &exp)?;
                    lc.record(uncurry_in(&g, &a, &b, &exp)? == f);
                    // (g x id_A) ; eval, pointwise
                    let recovered = ca.iter().all(|p| {
                        let (z, x) = p.as_pair().unwrap();
                        let gx = Value::pair(g.graph()[z].clone(), x.clone());
                        ev.apply(&gx).ok() == f.apply(p).ok()
                    });
                    lc.record(recovered);
                }
            }
        }
    }
    Ok(lc)
}

/// Currying commutes with reindexing in `C` and with precomposition in `A`.
pub fn exponential_naturality(max: usize, cap: u128) -> Result<LawCheck, FinsetError> {
    let mut lc = LawCheck::new("exponential naturality in C and A");
    for c in sets(max) {
        for a in sets(max) {
            for b in sets(max) {
                let (ca, _, _) = product(&c, &a);
                let fs: Vec<_> = all_functions_capped(&ca, &b, cap)?.collect();
                for c2 in sets(max) {
                    for k in all_functions_capped(&c2, &c, cap)? {
                        let km = product_map(&k, &FinFunction::identity(&a));
                        for f in &fs {
                            let lhs = curry(&compose(&km, f)?, &c2, &a, &b)?;
                            let rhs = compose(&k, &curry(f, &c, &a, &b)?)?;
                            lc.record(lhs == rhs);
                        }
                    }
                }
                for a2 in sets(max) {
                    for h in all_functions_capped(&a2, &a, cap)? {
                        let hm = product_map(&FinFunction::identity(&c), &h);
                        let pre = exp_precompose(&h, &b);
                        for f in &fs {
                            let lhs = curry(&compose(&hm, f)?, &c, &a2, &b)?;
                            let rhs = compose(&curry(f, &c, &a, &b)?, &pre)?;
                            lc.record(lhs == rhs);
                        }
                    }
                }
            }
        }
    }
    Ok(lc)
}

pub fn power_functoriality(max: usize, cap: u128) -> Result<LawCheck, FinsetError> {
    let mut lc = LawCheck::new("power functoriality");
    for a in sets(max) {
        let id = FinFunction::identity(&a);
        lc.record(power_map(&id) == FinFunction::identity(&super::power_set(&a)));
        for b in sets(max) {
            for f in all_functions_capped(&a, &b, cap)? {
                for cset in sets(max) {
                    for g in all_functions_capped(&b, &cset, cap)? {
                        let lhs = power_map(&compose(&f, &g)?);
                        let rhs = compose(&power_map(&f), &power_map(&g))?;
                        lc.record(lhs == rhs);
                    }
                }
            }
        }
    }
    Ok(lc)
}

/// Every pair of maps `T -> A`, `T -> B` factors through exactly one map
/// into the product.
pub fn product_universal(max: usize, cap: u128) -> Result<LawCheck, FinsetError> {
    let mut lc = LawCheck::new("product universal property");
    for a in sets(max) {
        for b in sets(max) {
            let (p, p0, p1) = product(&a, &b);
            for t in sets(max.min(2)) {
                let mediators: Vec<_> = all_functions_capped(&t, &p, cap)?.collect();
                for f in all_functions_capped(&t, &a, cap)? {
                    for g in all_functions_capped(&t, &b, cap)? {
                        let mut n = 0;
                        for u in &mediators {
                            if compose(u, &p0)? == f && compose(u, &p1)? == g {
                                n += 1;
                            }
                        }
                        lc.record(n == 1);
                    }
                }
            }
        }
    }
    Ok(lc)
}

/// The whole suite; naturality squares use sets of size at most 2.
pub fn topos_laws(max: usize, cap: u128) -> Result<Vec<LawCheck>, FinsetError> {
    let small = max.min(2);
    Ok(vec![
        classifier_bijection(max, cap)?,
        classifier_naturality(small, cap)?,
        exponential_bijection(max, cap)?,
        exponential_naturality(small, cap)?,
        power_functoriality(max, cap)?,
        product_universal(max, cap)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::super::DEFAULT_ENUMERATION_CAP;
    use super::*;

    #[test]
    fn all_laws_hold_up_to_two() {
        for lc in topos_laws(2, DEFAULT_ENUMERATION_CAP).unwrap() {
            assert!(lc.passed(), "{lc}");
            assert!(lc.instances > 0);
        }
    }

    #[test]
    fn tiny_cap_is_reported() {
        assert!(matches!(
            exponential_bijection(3, 10),
            Err(FinsetError::CapExceeded { .. })
        ));
    }

    #[test]
    fn display_line() {
        let lc = LawCheck {
            law: "x",
            instances: 3,
            failures: 1,
        };
        assert_eq!(lc.to_string(), "FAIL x: 3 instances, 1 failures");
    }
}
