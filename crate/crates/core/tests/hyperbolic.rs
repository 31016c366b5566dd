use multicurve_count::enumeration::{enumerate, SurfaceModel};
use multicurve_count::hyperbolic::{
    arccosh, build_rep, count_by_length, det, length, pruning_constant, trace,
    translation_length, FenchelNielsen, LengthFunction, Mat, SurfaceGroupRep, Word,
};
use multicurve_count::{build_surface, Decoder, DtCoords, Error, TypeInvariant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dt(x: &[i64]) -> DtCoords {
    let n = x.len() / 2;
    DtCoords::new(x[..n].iter().map(|&m| m as u32).collect(), x[n..].to_vec()).unwrap()
}

fn unit(n: usize, i: usize) -> DtCoords {
    let mut c = DtCoords::zero(n);
    c.t[i] = 1;
    c
}

fn norm2(m: &Mat) -> f64 {
    m.iter().flatten().map(|x| x * x).sum()
}

/// Forward error scale of the product of the word's matrices.
fn word_scale(rep: &SurfaceGroupRep, w: &Word) -> f64 {
    w.0.iter().map(|l| norm2(&rep.matrices[l.generator]).sqrt()).product()
}

fn random_fn(rng: &mut ChaCha8Rng, n: usize) -> FenchelNielsen {
    FenchelNielsen::new(
        (0..n).map(|_| rng.gen_range(0.5..3.0)).collect(),
        (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect(),
    )
    .unwrap()
}

#[test]
fn cuff_lengths_reproduced() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for g in [2, 3] {
        let s = build_surface(g).unwrap();
        for _ in 0..100 {
            let f = random_fn(&mut rng, s.num_cuffs);
            let rep = build_rep(&s, &f).unwrap();
            for m in &rep.matrices {
                // rounding in det grows with the squared entry size
                let scale = if g == 2 { 1.0 } else { norm2(m).max(1.0) };
                assert!((det(m) - 1.0).abs() < 1e-12 * scale, "{m:?}");
            }
            let mut lf = LengthFunction::new(&s, &f).unwrap();
            for i in 0..s.num_cuffs {
                let w = rep.word_matrix(&rep.cuff_word(i));
                let want = 2.0 * (f.lengths[i] / 2.0).cosh();
                assert!((trace(&w).abs() - want).abs() < 1e-9);
                assert!((lf.length(&unit(s.num_cuffs, i)).unwrap() - f.lengths[i]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn metric_examples() {
    let s = build_surface(2).unwrap();
    let f: FenchelNielsen = "1,1,1;0,0,0".parse().unwrap();
    let rep = build_rep(&s, &f).unwrap();
    let t = trace(&rep.word_matrix(&rep.cuff_word(0))).abs();
    assert!((t - 2.25526).abs() < 1e-5, "{t}");
    assert_eq!(build_rep(&s, &f).unwrap().matrices, rep.matrices);
    assert!(matches!(
        "0,1,1;0,0,0".parse::<FenchelNielsen>(),
        Err(Error::InvalidMetric(_))
    ));
    assert!(build_rep(&s, &"1,1;0,0".parse().unwrap()).is_err());

    let g: FenchelNielsen = "1.3,1,1;0,0,0".parse().unwrap();
    let mut lf = LengthFunction::new(&s, &g).unwrap();
    assert!((lf.length(&dt(&[0, 0, 0, 2, 0, 0])).unwrap() - 2.6).abs() < 1e-12);

    let m = [[3.0, 0.0], [0.0, 0.0]];
    assert!((translation_length(&m).unwrap() - 1.92485).abs() < 1e-5);
    assert!((2.0 * arccosh(1.5) - 1.92485).abs() < 1e-5);
    assert!(matches!(
        translation_length(&[[1.0, 1.0], [0.0, 1.0]]),
        Err(Error::NonHyperbolic { .. })
    ));
    assert!(matches!(lf.length(&DtCoords::zero(3)), Err(Error::EmptyMultiCurve)));
}

#[test]
fn words_agree_with_direct_holonomy() {
    let s = build_surface(2).unwrap();
    let f: FenchelNielsen = "1.5,0.8,1.2;0.3,0,-0.4".parse().unwrap();
    let rep = build_rep(&s, &f).unwrap();
    let mut dec = Decoder::new(&s);
    let mut lf = LengthFunction::new(&s, &f).unwrap();
    let model = SurfaceModel::new(&s);
    for x in enumerate(&model, 8, None) {
        let c = dt(&x);
        let mc = dec.decode(&c).unwrap();
        for comp in &mc.components {
            let w = rep.component_word(comp);
            assert!(w.is_cyclically_reduced());
            let a = translation_length(&rep.component_holonomy(comp)).unwrap();
            let b = translation_length(&rep.word_matrix(&w)).unwrap();
            assert!((a - b).abs() < 1e-9 * a, "{c}: {a} vs {b}");
        }
        let l1 = length(&rep, &mc).unwrap();
        let l2 = lf.length(&c).unwrap();
        assert!((l1 - l2).abs() < 1e-9 * l1, "{c}");
    }
}

#[test]
fn genus_three_words_agree() {
    let s = build_surface(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_fn(&mut rng, s.num_cuffs);
    let rep = build_rep(&s, &f).unwrap();
    let mut dec = Decoder::new(&s);
    for x in enumerate(&SurfaceModel::new(&s), 5, None) {
        let mc = dec.decode(&dt(&x)).unwrap();
        for comp in &mc.components {
            let w = rep.component_word(comp);
            let a = trace(&rep.component_holonomy(comp)).abs();
            let b = trace(&rep.word_matrix(&w)).abs();
            assert!((a - b).abs() < 1e-14 * word_scale(&rep, &w).max(a), "{a} {b}");
        }
    }
}

#[test]
fn seam_aligned_curve_is_twice_the_seam() {
    // with twists -l/2 and +l/2 the two seams between cuffs 1 and 2 meet the
    // cuffs head on and close up into a geodesic
    let s = build_surface(2).unwrap();
    let f: FenchelNielsen = "1,1,1;-0.5,0.5,0".parse().unwrap();
    let mut lf = LengthFunction::new(&s, &f).unwrap();
    let h: f64 = 0.5;
    let seam = arccosh((h.cosh() + h.cosh() * h.cosh()) / (h.sinh() * h.sinh()));
    let l = lf.length(&dt(&[1, 1, 0, 0, 0, 0])).unwrap();
    assert!((l - 2.0 * seam).abs() < 1e-9, "{l}");
}

#[test]
fn dehn_twist_matches_metric_twist() {
    let s = build_surface(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let model = SurfaceModel::new(&s);
    let pts = enumerate(&model, 8, None);
    for _ in 0..200 {
        let f = random_fn(&mut rng, 3);
        let c = dt(&pts[rng.gen_range(0..pts.len())]);
        let i = rng.gen_range(0..3);
        if c.m[i] == 0 {
            continue;
        }
        let twisted = c.twist_about_cuff(i, 1).unwrap();
        let mut g = f.clone();
        g.twists[i] += f.lengths[i];
        let a = LengthFunction::new(&s, &f).unwrap().length(&twisted).unwrap();
        let b = LengthFunction::new(&s, &g).unwrap().length(&c).unwrap();
        assert!((a - b).abs() < 1e-9 * a, "{c} cuff {i}");
    }
}

#[test]
fn twist_changes_length_not_type() {
    let s = build_surface(2).unwrap();
    let f: FenchelNielsen = "1,1,1;0,0,0".parse().unwrap();
    let mut lf = LengthFunction::new(&s, &f).unwrap();
    let mut dec = Decoder::new(&s);
    let c = dt(&[1, 1, 2, 0, 1, -1]);
    let d = c.twist_about_cuff(2, 1).unwrap();
    assert_eq!(dec.classify(&c), dec.classify(&d));
    assert!((lf.length(&c).unwrap() - lf.length(&d).unwrap()).abs() > 1e-3);
}

#[test]
fn homogeneous_on_rays() {
    let s = build_surface(2).unwrap();
    let f: FenchelNielsen = "1.5,0.8,1.2;0.3,0,-0.4".parse().unwrap();
    let mut lf = LengthFunction::new(&s, &f).unwrap();
    for x in enumerate(&SurfaceModel::new(&s), 6, None) {
        let c = dt(&x);
        let l = lf.length(&c).unwrap();
        for k in [2, 3, 5] {
            let lk = lf.length(&c.scale(k)).unwrap();
            assert!((lk - k as f64 * l).abs() < 1e-9 * lk, "{c} x{k}");
        }
    }
}

#[test]
fn twist_growth() {
    let s = build_surface(2).unwrap();
    let f: FenchelNielsen = "3,3,3;0,0,0".parse().unwrap();
    let mut lf = LengthFunction::new(&s, &f).unwrap();
    let g = dt(&[1, 1, 0, 0, 0, 0]);
    let n = 64;
    let l = lf.length(&g.twist_about_cuff(0, n).unwrap()).unwrap();
    let rel = (l / n as f64 / (g.m[0] as f64 * f.lengths[0]) - 1.0).abs();
    assert!(rel < 0.02, "{rel}");
    // the increments converge much faster than the ratio
    let f1: FenchelNielsen = "1,1,1;0,0,0".parse().unwrap();
    let mut lf1 = LengthFunction::new(&s, &f1).unwrap();
    let a = lf1.length(&g.twist_about_cuff(0, 63).unwrap()).unwrap();
    let b = lf1.length(&g.twist_about_cuff(0, 64).unwrap()).unwrap();
    assert!((b - a - 1.0).abs() < 1e-3, "{}", b - a);
}

#[test]
fn convexity_on_same_orthant_pairs() {
    let s = build_surface(2).unwrap();
    let f: FenchelNielsen = "1.5,0.8,1.2;0.3,0,-0.4".parse().unwrap();
    let mut lf = LengthFunction::new(&s, &f).unwrap();
    let pts = enumerate(&SurfaceModel::new(&s), 12, None);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut done = 0;
    while done < 2000 {
        let a = dt(&pts[rng.gen_range(0..pts.len())]);
        let b = dt(&pts[rng.gen_range(0..pts.len())]);
        let Ok(c) = a.add(&b) else { continue };
        done += 1;
        let (la, lb, lc) = (lf.length(&a).unwrap(), lf.length(&b).unwrap(), lf.length(&c).unwrap());
        assert!(lc <= la + lb + 1e-6, "{a} + {b}");
    }
}

#[test]
fn pruning_constant_scan() {
    let s = build_surface(2).unwrap();
    let f: FenchelNielsen = "1,1,1;0,0,0".parse().unwrap();
    let p = pruning_constant(&s, &f).unwrap();
    assert!(p.c_hat > 0.0);
    assert!((p.c_hat - 0.491093671939543).abs() < 1e-9, "{}", p.c_hat);
    assert_eq!(p.min_witness, "0,1,1;0,-5,5");
    assert!(p.max_ratio >= p.min_ratio);
    // the ratio is constant on rays
    let mut lf = LengthFunction::new(&s, &f).unwrap();
    let w: DtCoords = p.min_witness.parse().unwrap();
    let r1 = lf.length(&w).unwrap() / w.norm() as f64;
    let r3 = lf.length(&w.scale(3)).unwrap() / w.scale(3).norm() as f64;
    assert!((r1 - r3).abs() < 1e-12);
    assert!((r1 - p.min_ratio).abs() < 1e-12);
}

#[test]
fn length_counts_match_brute_force() {
    let s = build_surface(2).unwrap();
    let f: FenchelNielsen = "1.5,0.8,1.2;0.3,0,-0.4".parse().unwrap();
    let p = pruning_constant(&s, &f).unwrap();
    let ty = TypeInvariant::nonseparating_scc(2);
    let grid = [0.5, 4.0, 6.0, 8.0, 9.0];
    let r = count_by_length(&s, &f, &ty, &grid, &p).unwrap();
    assert!(!r.audit.incomplete);
    assert_eq!(r.counts[0], 0, "below the systole");
    assert!(r.counts.windows(2).all(|w| w[0] <= w[1]));

    let rep = build_rep(&s, &f).unwrap();
    let mut dec = Decoder::new(&s);
    let mut want = vec![0u64; grid.len()];
    for x in enumerate(&SurfaceModel::new(&s), (9.0 / p.c_hat) as u64, None) {
        let mc = dec.decode(&dt(&x)).unwrap();
        if mc.type_invariant != ty {
            continue;
        }
        let l = length(&rep, &mc).unwrap();
        for (j, &lj) in grid.iter().enumerate() {
            if l <= lj {
                want[j] += 1;
            }
        }
    }
    assert_eq!(r.counts, want);
    assert!(want[4] > 0);
}
