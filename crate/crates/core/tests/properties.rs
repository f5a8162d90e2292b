use proptest::prelude::*;

use glue_core::nbe::{def_eq, eval_identity, nf, nf_typed, reflect, reify};
use glue_core::normal::{check_nf, readback_ne, readback_nf, Nf};
use glue_core::oracle::{naive_nf, oracle_eq, perturb, perturb_with, PerturbRule};
use glue_core::renaming::{ren_comp, ren_id, ren_to_sub, rename_nf, rename_tm};
use glue_core::signature::{parse_signature, Ctx, Signature, Ty};
use glue_core::syntax::{infer_tm, parse_tm, Tm};
use glue_core::testgen::{Gen, GenConfig};

fn sig0() -> Signature {
    parse_signature(include_str!("../../../sigs/sig0.sexp")).unwrap()
}

fn gen(seed: u64, max_size: usize) -> Gen {
    Gen::new(GenConfig { max_size, ..GenConfig::new(sig0(), seed) })
}

fn typed(seed: u64) -> (Signature, Gen, Ctx, Ty, Tm) {
    let mut g = gen(seed, 20);
    let (ctx, ty, t) = g.gen_typed_tm();
    (sig0(), g, ctx, ty, t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_terms_have_their_type(seed: u64) {
        let (sig, _, ctx, ty, t) = typed(seed);
        prop_assert_eq!(infer_tm(&sig, &ctx, &t).unwrap(), ty);
    }

    #[test]
    fn printing_round_trips(seed: u64) {
        let (_, _, _, _, t) = typed(seed);
        prop_assert_eq!(parse_tm(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn json_round_trips(seed: u64) {
        let (sig, _, ctx, ty, t) = typed(seed);
        let back: Tm = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        prop_assert_eq!(back, t.clone());
        let n = nf(&sig, &ctx, &t).unwrap();
        let back: Nf = serde_json::from_str(&serde_json::to_string(&n).unwrap()).unwrap();
        prop_assert_eq!(back, n);
        let back: Ty = serde_json::from_str(&serde_json::to_string(&ty).unwrap()).unwrap();
        prop_assert_eq!(back, ty);
    }

    #[test]
    fn renaming_preserves_types(seed: u64) {
        let (sig, mut g, ctx, ty, t) = typed(seed);
        let r = g.gen_ren(&ctx);
        prop_assert_eq!(infer_tm(&sig, r.dom(), &rename_tm(&r, &t)).unwrap(), ty);
    }

    #[test]
    fn identity_renaming_is_inert(seed: u64) {
        let (sig, _, ctx, _, t) = typed(seed);
        prop_assert_eq!(rename_tm(&ren_id(&ctx), &t), t.clone());
        let n = nf(&sig, &ctx, &t).unwrap();
        prop_assert_eq!(rename_nf(&ren_id(&ctx), &n), n);
    }

    #[test]
    fn renaming_is_functorial(seed: u64) {
        let (sig, mut g, ctx, _, t) = typed(seed);
        let r2 = g.gen_ren(&ctx);
        let r1 = g.gen_ren(r2.dom());
        let both = ren_comp(&r2, &r1).unwrap();
        let n = nf(&sig, &ctx, &t).unwrap();
        prop_assert_eq!(rename_nf(&both, &n), rename_nf(&r1, &rename_nf(&r2, &n)));
        let stepwise = rename_tm(&r1, &rename_tm(&r2, &t));
        prop_assert!(oracle_eq(&sig, both.dom(), &rename_tm(&both, &t), &stepwise).unwrap());
    }

    #[test]
    fn renaming_is_substitution(seed: u64) {
        let (sig, mut g, ctx, _, t) = typed(seed);
        let r = g.gen_ren(&ctx);
        let as_sub = Tm::sub(t.clone(), ren_to_sub(&r));
        prop_assert!(oracle_eq(&sig, r.dom(), &rename_tm(&r, &t), &as_sub).unwrap());
    }

    #[test]
    fn nf_is_natural(seed: u64) {
        let (sig, mut g, ctx, _, t) = typed(seed);
        let r = g.gen_ren(&ctx);
        let n = nf(&sig, &ctx, &t).unwrap();
        prop_assert_eq!(nf(&sig, r.dom(), &rename_tm(&r, &t)).unwrap(), rename_nf(&r, &n));
    }

    #[test]
    fn nf_is_eta_long_and_agrees_with_the_oracle(seed: u64) {
        let (sig, _, ctx, ty, t) = typed(seed);
        let (n, nty) = nf_typed(&sig, &ctx, &t).unwrap();
        prop_assert_eq!(&nty, &ty);
        prop_assert!(check_nf(&sig, &ctx, &n, &ty));
        prop_assert_eq!(readback_nf(&n), naive_nf(&sig, &ctx, &t).unwrap());
    }

    #[test]
    fn normal_forms_are_fixed_points(seed: u64) {
        let mut g = gen(seed, 16);
        let sig = sig0();
        let ctx = g.gen_ctx();
        let ty = g.gen_ty(2);
        if let Ok(n) = g.gen_nf(&ctx, &ty) {
            prop_assert!(check_nf(&sig, &ctx, &n, &ty));
            prop_assert_eq!(nf(&sig, &ctx, &readback_nf(&n)).unwrap(), n.clone());
            prop_assert_eq!(naive_nf(&sig, &ctx, &readback_nf(&n)).unwrap(), readback_nf(&n));
        }
    }

    #[test]
    fn oracle_is_idempotent(seed: u64) {
        let (sig, _, ctx, _, t) = typed(seed);
        let once = naive_nf(&sig, &ctx, &t).unwrap();
        prop_assert_eq!(naive_nf(&sig, &ctx, &once).unwrap(), once);
    }

    #[test]
    fn perturbation_preserves_type_and_meaning(seed: u64, steps in 0usize..4) {
        let (sig, _, ctx, ty, t) = typed(seed);
        let u = perturb(seed ^ 0x5eed, &sig, &ctx, &t, steps).unwrap();
        prop_assert_eq!(infer_tm(&sig, &ctx, &u).unwrap(), ty);
        prop_assert_eq!(nf(&sig, &ctx, &u).unwrap(), nf(&sig, &ctx, &t).unwrap());
    }

    #[test]
    fn each_perturb_rule_is_sound(seed: u64, rule in 0..PerturbRule::ALL.len()) {
        let (sig, _, ctx, ty, t) = typed(seed);
        let u = perturb_with(seed, &sig, &ctx, &t, 2, &[PerturbRule::ALL[rule]]).unwrap();
        prop_assert_eq!(infer_tm(&sig, &ctx, &u).unwrap(), ty);
        prop_assert!(oracle_eq(&sig, &ctx, &t, &u).unwrap());
    }

    #[test]
    fn def_eq_is_an_equivalence_on_samples(seed: u64) {
        let (sig, mut g, ctx, ty, t) = typed(seed);
        prop_assert!(def_eq(&sig, &ctx, &t, &t).unwrap());
        if let Ok(u) = g.gen_tm(&ctx, &ty) {
            let (a, b) = (def_eq(&sig, &ctx, &t, &u).unwrap(), def_eq(&sig, &ctx, &u, &t).unwrap());
            prop_assert_eq!(a, b);
            prop_assert_eq!(a, oracle_eq(&sig, &ctx, &t, &u).unwrap());
        }
    }

    #[test]
    fn reify_after_reflect_expands_neutrals(seed: u64) {
        let mut g = gen(seed, 12);
        let sig = sig0();
        let ctx = g.gen_ctx();
        if let Ok((n, ty)) = g.gen_ne(&ctx) {
            let back = reify(&sig, &ctx, &ty, &reflect(&ctx, &ty, n.clone())).unwrap();
            prop_assert!(check_nf(&sig, &ctx, &back, &ty));
            if ty.is_atom() {
                prop_assert_eq!(back, Nf::Shift(n));
            } else {
                prop_assert!(oracle_eq(&sig, &ctx, &readback_nf(&back), &readback_ne(&n)).unwrap());
            }
        }
    }

    #[test]
    fn glued_syntax_recovers_the_term(seed: u64) {
        let (sig, mut g, ctx, _, _) = typed(seed);
        let ty = Ty::arrow(g.gen_ty(1), g.gen_ty(1));
        if let Ok(t) = g.gen_tm(&ctx, &ty) {
            let (v, _) = eval_identity(&sig, &ctx, &t).unwrap();
            let glue_core::nbe::Val::Arrow(gl) = v else { panic!("arrow value expected") };
            prop_assert!(oracle_eq(&sig, &ctx, &gl.syn(&sig).unwrap(), &t).unwrap());
        }
    }
}
