use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use polyech::complex::{ComplexSpec, GradedComplex};
use polyech::differential::differential_chain;
use polyech::homology::{homology_reports, is_boundary, HomologyReport};
use polyech::lattice::v;
use polyech::linalg::{invariant_factors, smith_normal_form, solve, Solve, SparseIntMatrix};
use polyech::path::{n_convex, AdmissiblePath};
use polyech::sample;
use polyech::verify::below_generators;

fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = b.first().map_or(0, Vec::len);
    a.iter().map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, r)| x * &r[j]).sum()).collect()).collect()
}

fn is_identity(m: &[Vec<BigInt>]) -> bool {
    m.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() }))
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

fn small_path() -> impl Strategy<Value = AdmissiblePath> {
    any::<u64>().prop_map(|seed| {
        let mut rng = sample::rng(seed);
        loop {
            let p = match seed % 3 {
                0 => sample::closed_path(&mut rng, 2, 6, 2),
                1 => sample::open_distinct(&mut rng, 2, 6),
                _ => sample::open_equal(&mut rng, 2, 6),
            }
            .unwrap();
            if p.num_edges() <= 8 {
                return p;
            }
        }
    })
}

fn ranks(p: &AdmissiblePath) -> Vec<(i64, usize, Vec<u64>)> {
    let cx = GradedComplex::build(&ComplexSpec::Below { path: p.clone() }).unwrap();
    let degrees = cx.degrees();
    homology_reports(&cx, degrees).unwrap().into_iter().map(|r| (r.degree, r.rank, r.torsion)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_transforms_diagonalize(m in matrix()) {
        let sparse = SparseIntMatrix::from_dense(&m);
        let sf = smith_normal_form(&sparse);
        let d = mul(&mul(&sf.u, &sparse.to_dense()), &sf.v);
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j && i < sf.divisors.len() { sf.divisors[i].clone() } else { BigInt::zero() };
                prop_assert_eq!(x, &want);
            }
        }
        prop_assert!(sf.divisors.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
        prop_assert!(is_identity(&mul(&sf.u, &sf.u_inv)));
        prop_assert!(is_identity(&mul(&sf.v, &sf.v_inv)));
        prop_assert_eq!(invariant_factors(&sparse).unwrap(), sf.divisors);
    }

    #[test]
    fn solve_certifies(m in matrix(), seed in any::<u64>()) {
        let sparse = SparseIntMatrix::from_dense(&m);
        let cols = m[0].len();
        let y: Vec<i64> = (0..cols).map(|j| ((seed >> (j * 3)) % 7) as i64 - 3).collect();
        let b: Vec<i64> = m.iter().map(|row| row.iter().zip(&y).map(|(a, x)| a * x).sum()).collect();
        match solve(&sparse, &b).unwrap() {
            Solve::Solution(z) => {
                let back: Vec<i64> = m.iter().map(|row| row.iter().zip(&z).map(|(a, x)| a * x).sum()).collect();
                prop_assert_eq!(back, b);
            }
            s => prop_assert!(false, "consistent system reported {:?}", s),
        }
    }

    #[test]
    fn triplets_round_trip(m in matrix()) {
        let sparse = SparseIntMatrix::from_dense(&m);
        prop_assert_eq!(SparseIntMatrix::from_triplets(&sparse.to_triplets()).unwrap(), sparse);
    }

    #[test]
    fn below_set_is_downward_closed(p in small_path()) {
        let below = p.enumerate_below().unwrap();
        prop_assert!(below.contains(&p));
        for q in &below {
            prop_assert!(q.leq(&p).unwrap());
            prop_assert!(q.leq(q).unwrap());
            if q != &p {
                prop_assert!(!p.leq(q).unwrap());
            }
            for c in q.corners().iter().filter(|c| c.roundable()) {
                let r = q.round_corner(c.index).unwrap();
                prop_assert!(r.leq(q).unwrap());
                prop_assert!(below.contains(&r));
                prop_assert_eq!(r.length_cmp(q), std::cmp::Ordering::Less);
            }
        }
    }

    #[test]
    fn homology_is_translation_invariant(p in small_path(), x in -5i64..5, y in -5i64..5) {
        prop_assert_eq!(ranks(&p), ranks(&p.translate(v(x, y))));
    }

    #[test]
    fn homology_is_symmetric(p in small_path(), k in 0usize..3) {
        let a = [[[0, -1], [1, 0]], [[1, 1], [0, 1]], [[1, 0], [-1, 1]]][k];
        let q = p.act_symmetry(a, 0).unwrap();
        prop_assert_eq!(ranks(&p), ranks(&q));
    }

    #[test]
    fn boundaries_have_witnesses(p in small_path(), pick in any::<prop::sample::Index>()) {
        let cx = GradedComplex::build(&ComplexSpec::Below { path: p.clone() }).unwrap();
        let gens = below_generators(&p).unwrap();
        let g = pick.get(&gens);
        let x = differential_chain(&polyech::chain::Chain::single(g.clone(), 1)).unwrap();
        let w = is_boundary(&x, &cx).unwrap();
        let y = w.witness().expect("a boundary");
        prop_assert_eq!(cx.boundary_chain(y).unwrap(), x);
    }
}

#[test]
fn reordered_polygon_gives_the_same_path() {
    let pts = [v(0, 0), v(2, 0), v(2, 1), v(0, 2)];
    let mut rev = pts;
    rev.reverse();
    assert_eq!(n_convex(&pts, 2).unwrap(), n_convex(&rev, 2).unwrap());
    assert_eq!(ranks(&n_convex(&pts, 1).unwrap()), ranks(&n_convex(&[v(2, 1), v(0, 0), v(0, 2), v(2, 0)], 1).unwrap()));
}

#[test]
fn unit_square_counts() {
    let sq = n_convex(&[v(0, 0), v(1, 0), v(1, 1), v(0, 1)], 1).unwrap();
    assert_eq!(sq.enumerate_below().unwrap().len(), 15);
    assert_eq!(below_generators(&sq).unwrap().len(), 76);
}

#[test]
fn spec_and_report_json_round_trip() {
    let sq = n_convex(&[v(0, 0), v(1, 0), v(1, 1), v(0, 1)], 1).unwrap();
    let specs = [
        ComplexSpec::Below { path: sq.clone() },
        ComplexSpec::BelowComponent { path: sq, j: -2 },
        ComplexSpec::Bar { n: 1, diameter: 2, degrees: [0, 3] },
        ComplexSpec::Xaxis { n: 2, m: 4, degrees: [0, 4], j: Some(0) },
        ComplexSpec::Xaxis { n: 1, m: 4, degrees: [0, 4], j: None },
        ComplexSpec::Periodic { n: 1, gamma: v(1, 1), heights: [-3, 3], length: 4, degrees: [0, 1] },
    ];
    for s in specs {
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<ComplexSpec>(&text).unwrap(), s);
        let cx = GradedComplex::build(&s).unwrap();
        let reports = homology_reports(&cx, cx.degrees()).unwrap();
        let text = serde_json::to_string(&reports).unwrap();
        assert_eq!(serde_json::from_str::<Vec<HomologyReport>>(&text).unwrap(), reports);
    }
}

#[test]
fn malformed_specs_are_rejected() {
    for text in [
        r#"{"kind":"torus"}"#,
        r#"{"kind":"bar","n":1}"#,
        r#"{"kind":"below","path":{"kind":{"closed":{"n":1}},"edges":[{"dir":[2,0],"lap":0,"mult":1}],"anchor":[0,0]}}"#,
        r#"{"kind":"below","path":{"kind":{"closed":{"n":1}},"edges":[{"dir":[1,0],"lap":0,"mult":1}],"anchor":[0,0]}}"#,
    ] {
        assert!(serde_json::from_str::<ComplexSpec>(text).is_err(), "{text}");
    }
}
