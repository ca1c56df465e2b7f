//! Random Gaussian systems and the kernel identities checked on them.

#![allow(dead_code)]

use gic_core::{entropy, mutual_info, Complex, Field, GaussVar, LatentBasis};
use proptest::prelude::*;

pub const LATENTS: usize = 6;
pub const VARS: usize = 5;

/// Five variables over six shared latents plus one private latent each, so
/// every covariance is well conditioned.
#[derive(Clone, Debug)]
pub struct RandomSystem {
    pub field: Field,
    pub vars: Vec<GaussVar<f64>>,
}

pub fn system_strategy() -> impl Strategy<Value = RandomSystem> {
    (
        any::<bool>(),
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), VARS * LATENTS),
        prop::collection::vec(0.2f64..1.0, VARS),
    )
        .prop_map(|(complex, coeffs, private)| {
            let field = if complex { Field::Complex } else { Field::Real };
            let mut basis = LatentBasis::new(field);
            let shared: Vec<GaussVar<f64>> = (0..LATENTS).map(|_| basis.fresh()).collect();
            let vars = (0..VARS)
                .map(|i| {
                    let terms: Vec<(Complex<f64>, &GaussVar<f64>)> = (0..LATENTS)
                        .map(|j| {
                            let (re, im) = coeffs[i * LATENTS + j];
                            let c = if complex {
                                Complex::new(re, im)
                            } else {
                                Complex::new(re, 0.0)
                            };
                            (c, &shared[j])
                        })
                        .collect();
                    &GaussVar::combine(&terms) + &basis.fresh_scaled(private[i])
                })
                .collect();
            RandomSystem { field, vars }
        })
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> Result<(), String> {
    if (a - b).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: {a} vs {b}"))
    }
}

/// `h` of independent scalars against `Σ scale·log2(c·var)`.
pub fn check_entropy_closed_form(sys: &RandomSystem) -> Result<(), String> {
    let (scale, c) = match sys.field {
        Field::Complex => (1.0, std::f64::consts::PI * std::f64::consts::E),
        Field::Real => (0.5, 2.0 * std::f64::consts::PI * std::f64::consts::E),
    };
    for v in &sys.vars {
        let h = entropy(std::slice::from_ref(v), sys.field).unwrap();
        close(h, scale * (c * v.variance()).log2(), 1e-12, "scalar entropy")?;
    }
    let mut basis = LatentBasis::<f64>::new(sys.field);
    let sds = [0.3, 1.0, 2.5];
    let indep: Vec<_> = sds.iter().map(|&s| basis.fresh_scaled(s)).collect();
    let h = entropy(&indep, sys.field).unwrap();
    let want: f64 = sds.iter().map(|s| scale * (c * s * s).log2()).sum();
    close(h, want, 1e-12, "independent vector entropy")
}

/// Chain rule, nonnegativity, conditioning-set invariance and symmetry.
pub fn check_identities(sys: &RandomSystem) -> Result<(), String> {
    let f = sys.field;
    let v = &sys.vars;
    let a = &v[0..2];
    let b = &v[2..3];
    let c = &v[3..5];
    let mi = |x: &[GaussVar<f64>], y: &[GaussVar<f64>], z: &[GaussVar<f64>]| mutual_info(x, y, z, f).unwrap();
    let h = |x: &[GaussVar<f64>]| entropy(x, f).unwrap();
    let cat = |x: &[GaussVar<f64>], y: &[GaussVar<f64>]| [x, y].concat();
    let tol = 1e-9;

    close(mi(a, b, &[]), h(a) + h(b) - h(&cat(a, b)), tol, "I from entropies")?;
    close(
        mi(a, b, c),
        h(&cat(a, c)) + h(&cat(b, c)) - h(&cat(&cat(a, b), c)) - h(c),
        tol,
        "conditional I from entropies",
    )?;
    close(mi(a, &cat(b, c), &[]), mi(a, c, &[]) + mi(a, b, c), tol, "chain rule")?;
    close(h(&cat(a, b)), h(a) + h(b) - mi(a, b, &[]), tol, "entropy chain")?;
    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
        let val = mi(x, y, z);
        if val < -tol {
            return Err(format!("negative mutual information {val}"));
        }
        close(val, mi(y, x, z), tol, "symmetry")?;
    }
    let mixed = [&c[0] + &c[1].scale(Complex::new(2.0, 0.0)), c[1].clone()];
    let swapped = [c[1].clone(), c[0].clone()];
    let padded = [c[0].clone(), c[1].clone(), &c[0] - &c[1]];
    let base = mi(a, b, c);
    close(base, mi(a, b, &mixed), tol, "conditioning on an equivalent span")?;
    close(base, mi(a, b, &swapped), tol, "conditioning order")?;
    close(base, mi(a, b, &padded), tol, "redundant conditioning variable")?;
    Ok(())
}
