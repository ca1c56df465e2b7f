use gic_core::baselines::{gen_kramer_objective, gen_kramer_three};
use gic_core::genie3::{
    thm2_closed_form, thm2_mi_value, thm2_value, thm3_value, thm4_r, thm4_r0_params, thm4_r1_params, thm4_symmetric,
    GenieConfig3, Thm2Branch, Thm3Branch,
};
use gic_core::kuser::{prop1_params, prop2_params, prop3_params, thm5_value, thm6_value, KGenieConfig};
use gic_core::{make_symmetric, prop1_closed, prop2_closed, prop3_closed, Complex, NoiseParam, SearchConfig};

fn re(x: f64) -> Complex<f64> {
    Complex::new(x, 0.0)
}

#[test]
fn thm2_closed_form_matches_joint_covariance() {
    let cases = [
        (re(0.4), re(0.7), re(0.9), NoiseParam::real(0.8, 0.3)),
        (
            Complex::new(0.2, 0.5),
            Complex::new(-0.3, 0.4),
            Complex::new(0.6, -0.1),
            NoiseParam::new(0.6, Complex::new(0.2, -0.4)),
        ),
        (re(1.3), re(0.5), re(0.2), NoiseParam::real(0.9, -0.5)),
    ];
    for (g1, g2, g3, n) in cases {
        let h = vec![
            vec![re(1.0), g1, g2],
            vec![g3, re(1.0), g1 * 0.7],
            vec![g2 * 0.5, g3, re(1.0)],
        ];
        let ch = gic_core::Channel::new(h, vec![10.0, 7.0, 4.0], gic_core::Field::Complex).unwrap();
        let mi = thm2_mi_value(&ch, &n);
        for b in [Thm2Branch::First, Thm2Branch::Second] {
            let cf = thm2_closed_form(&ch, &n, b).unwrap();
            assert!((cf - mi).abs() < 1e-9, "{b:?}: {cf} vs {mi}");
        }
    }
}

#[test]
fn thm2_at_unit_gain_is_log31() {
    let ch = make_symmetric(3, re(1.0), 10.0);
    let v = thm2_value(&ch, &NoiseParam::real(1.0, 1.0), Thm2Branch::First);
    assert!((v - 31f64.log2()).abs() < 1e-9, "{v}");
}

#[test]
fn hybrid_matches_symmetric_families() {
    for &g2 in &[0.2, 0.5, 0.9, 1.2] {
        for &p in &[1.0, 10.0, 100.0] {
            let g = re(f64::sqrt(g2));
            let ch = make_symmetric(3, g, p);
            for s in [0.3, 0.6, 0.9] {
                if let Some((n, w)) = thm4_r0_params(g, s) {
                    let r = thm4_r(p, g, &n, &w);
                    let t = thm3_value(&ch, &GenieConfig3::symmetric(w, n), Thm3Branch::I0);
                    if r.is_finite() {
                        assert!((r - t).abs() < 1e-8, "R0 g2={g2} p={p} s={s}: {r} vs {t}");
                    }
                }
            }
            for rn in [-0.8, -0.3, 0.0, 0.3] {
                if let Some((n, w)) = thm4_r1_params(g, re(rn)) {
                    let r = thm4_r(p, g, &n, &w);
                    let t = thm3_value(&ch, &GenieConfig3::symmetric(w, n), Thm3Branch::I1);
                    let gk = gen_kramer_objective(p, g, re(rn));
                    if r.is_finite() {
                        assert!((r - t).abs() < 1e-8, "R1 g2={g2} p={p} rn={rn}: {r} vs {t}");
                        assert!((r - gk).abs() < 1e-9, "R1 vs gk g2={g2} p={p} rn={rn}: {r} vs {gk}");
                    }
                }
            }
        }
    }
}

#[test]
fn r1_equals_generalized_kramer() {
    let cfg = SearchConfig::default();
    for &g2 in &[0.2, 0.5, 0.9, 1.2] {
        for &p in &[1.0, 10.0, 100.0] {
            let g = re(f64::sqrt(g2));
            let r = thm4_symmetric(p, g, &cfg);
            let gk = gen_kramer_three(&make_symmetric(3, g, p), &cfg).unwrap();
            assert!(
                (r.r1.sum_rate - gk.sum_rate).abs() < 1e-6,
                "g2={g2} p={p}: {} vs {}",
                r.r1.sum_rate,
                gk.sum_rate
            );
        }
    }
}

#[test]
fn closed_forms_match_expanded_bounds() {
    for &k in &[3usize, 4, 10, 100] {
        for &g2 in &[0.3, 0.5, 0.9, 1.5] {
            for &p in &[5.0, 10.0, 100.0] {
                let g = re(f64::sqrt(g2));
                if g2 < 1.0 {
                    let a = prop1_closed(k, g, p).sum_rate;
                    let b = thm5_value(k, g, p, &prop1_params(k, g));
                    assert!((a - b).abs() < 1e-9, "prop1 k={k} g2={g2} p={p}: {a} vs {b}");
                }
                let a = prop2_closed(k, g, p).sum_rate;
                let b = thm6_value(k, g, p, &prop2_params(k, g));
                assert!((a - b).abs() < 1e-9, "prop2 k={k} g2={g2} p={p}: {a} vs {b}");
                if g2 > 1.0 {
                    for gamma in [3.0, 10.0, 20.0] {
                        let a = prop3_closed(k, g, p, gamma).sum_rate;
                        let b = thm6_value(k, g, p, &prop3_params(k, g, gamma));
                        assert!(
                            (a - b).abs() < 1e-9,
                            "prop3 k={k} g2={g2} p={p} gamma={gamma}: {a} vs {b}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn three_user_consistency_of_k_user_forms() {
    for &g2 in &[0.3, 0.7] {
        let g = re(f64::sqrt(g2));
        let p = 10.0;
        let ch = make_symmetric(3, g, p);
        for n in [
            NoiseParam::real(0.8, 0.7),
            NoiseParam::real(0.6, 0.6),
            NoiseParam::real(0.9, 0.5),
        ] {
            let a = thm5_value(3, g, p, &[n]);
            let b = thm2_value(&ch, &n, Thm2Branch::First);
            if a.is_finite() || b.is_finite() {
                assert!((a - b).abs() < 1e-9, "thm5 vs thm2 g2={g2}: {a} vs {b}");
            }
            for w in [NoiseParam::real(0.9, 0.9), NoiseParam::real(0.7, 0.6)] {
                let a = thm6_value(3, g, p, &KGenieConfig::tied(3, n, w));
                let b = thm3_value(&ch, &GenieConfig3::symmetric(w, n), Thm3Branch::I0);
                if a.is_finite() || b.is_finite() {
                    assert!((a - b).abs() < 1e-9, "thm6 vs thm3 g2={g2}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn expanded_weak_bound_matches_joint_covariance() {
    use gic_core::kuser::{kub2b_reduced_chain, kub2b_reduced_value};
    for &k in &[4usize, 5] {
        for &g2 in &[0.2, 0.6] {
            let g = re(f64::sqrt(g2));
            let p = 10.0;
            let ch = make_symmetric(k, g, p);
            for s in [0.7, 0.85, 1.0] {
                let sig = kub2b_reduced_chain(&ch, s);
                let a = kub2b_reduced_value(&ch, &sig);
                let ns: Vec<_> = sig.iter().map(|&x| NoiseParam::real(x, 0.0)).collect();
                let b = thm5_value(k, g, p, &ns);
                assert!(a.is_finite() == b.is_finite(), "k={k} g2={g2} s={s}: {a} vs {b}");
                if a.is_finite() {
                    assert!((a - b).abs() < 1e-9, "k={k} g2={g2} s={s}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn three_user_hybrid_search_covers_k_user_search() {
    use gic_core::genie3::thm3_optimize;
    use gic_core::kuser::{thm6_bound, TieMode};
    let cfg = SearchConfig::fast();
    for &g2 in &[0.3, 0.9, 1.2] {
        let g = re(f64::sqrt(g2));
        let t = thm3_optimize(&make_symmetric(3, g, 10.0), Thm3Branch::I0, &cfg);
        let s = thm6_bound(3, g, 10.0, &cfg, TieMode::Tied).unwrap();
        assert!(
            t.sum_rate <= s.sum_rate + 1e-9,
            "g2={g2}: {} vs {}",
            t.sum_rate,
            s.sum_rate
        );
    }
}
