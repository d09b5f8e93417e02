use polyech::chain::Chain;
use polyech::cycles::{e_cycle, h_cycle};
use polyech::differential::{differential, differential_at, differential_chain, TwoHChoice};
use polyech::generator::Generator;
use polyech::lattice::GenericAngle;
use polyech::path::{n_convex, AdmissiblePath};
use polyech::sample::{self, open_arc};

/// Splits a convex arc at a random interior cut into two meeting pieces.
fn split(rng: &mut sample::SampleRng) -> (AdmissiblePath, AdmissiblePath) {
    loop {
        let base = n_convex(&sample::nonconstant_polygon(rng, 4, 10), 1).unwrap();
        let lo = sample::random_cut(rng, 1);
        let mid = GenericAngle::new(lo.lap, sample::random_direction(rng, 2));
        let mid = if mid.key() <= lo.key() { mid.add_laps(1) } else { mid };
        let hi = GenericAngle::new(mid.lap, sample::random_direction(rng, 2));
        let hi = if hi.key() <= mid.key() { hi.add_laps(1) } else { hi };
        if hi.key() > lo.add_laps(1).key() {
            continue;
        }
        let a = open_arc(&base, lo, mid).unwrap();
        let b = open_arc(&base, mid, hi).unwrap();
        if a.num_edges() > 0 && b.num_edges() > 0 {
            return (a, b);
        }
    }
}

fn juxtapose(x: &Chain, y: &Chain) -> Chain {
    let mut out = Chain::zero();
    for (a, ca) in x.iter() {
        for (b, cb) in y.iter() {
            out.add_term(a.concat(b).unwrap(), ca * cb);
        }
    }
    out
}

#[test]
fn concatenation_differential_rule() {
    let mut rng = sample::rng(31);
    for _ in 0..200 {
        let (pa, pb) = split(&mut rng);
        let a = sample::random_generator(&mut rng, &pa);
        let b = sample::random_generator(&mut rng, &pb);
        let ab = a.concat(&b).unwrap();
        let sign = if b.num_h() % 2 == 0 { 1 } else { -1 };
        let mut rhs = juxtapose(&differential(&a).unwrap(), &Chain::single(b.clone(), 1)).scaled(&sign);
        rhs.add_chain(&juxtapose(&Chain::single(a.clone(), 1), &differential(&b).unwrap()));
        rhs.add_chain(&differential_at(&ab, pa.num_edges(), TwoHChoice::Following).unwrap());
        assert_eq!(differential(&ab).unwrap(), rhs, "{a} . {b}");
    }
}

#[test]
fn rounding_the_junction() {
    let mut rng = sample::rng(32);
    let mut checked = 0;
    while checked < 100 {
        let (pa, pb) = split(&mut rng);
        let joined = pa.concat(&pb).unwrap();
        let c = pa.num_edges();
        if !joined.corner(c).unwrap().roundable() {
            continue;
        }
        let rounded = joined.round_corner(c).unwrap();
        let (ea, ha) = (e_cycle(&pa), h_cycle(&pa));
        let (eb, hb) = (e_cycle(&pb), h_cycle(&pb));
        assert_eq!(differential_chain(&juxtapose(&ea, &hb)).unwrap(), e_cycle(&rounded));
        assert_eq!(differential_chain(&juxtapose(&ha, &eb)).unwrap(), e_cycle(&rounded).neg());
        assert_eq!(differential_chain(&juxtapose(&ha, &hb)).unwrap(), h_cycle(&rounded));
        assert_eq!(
            Generator::all_e(pa.clone()).concat(&Generator::all_e(pb.clone())).unwrap(),
            Generator::all_e(joined)
        );
        checked += 1;
    }
}

#[test]
fn concat_rejects_gaps() {
    let mut rng = sample::rng(33);
    let (pa, pb) = split(&mut rng);
    assert!(pb.concat(&pa).is_err());
    assert!(pa.concat(&pb.translate(polyech::lattice::v(1, 0))).is_err());
}
