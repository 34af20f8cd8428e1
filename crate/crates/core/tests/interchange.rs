use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crystalline::fcrystal::FCrystal;
use crystalline::fgl::{gm, BaseRing};
use crystalline::geometry::supersingular_census;
use crystalline::interchange::{census_value, fcrystal_value, fgl_value, witt_value, Document, Kind};
use crystalline::witt::WittVector;
use crystalline::FiniteField;

fn round_trip(doc: &Document) {
    let text = doc.to_canonical();
    let parsed = Document::parse(&text).unwrap();
    let again = parsed.decode().unwrap().encode().to_canonical();
    assert_eq!(text, again);
}

#[test]
fn objects_round_trip() {
    let k = FiniteField::new(3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    round_trip(&Document::new(Kind::Witt, witt_value(&WittVector::random(&k, 3, &mut rng))));
    round_trip(&Document::new(Kind::FCrystal, fcrystal_value(&FCrystal::standard_n(2, 3, &k, 6).unwrap())));
    round_trip(&Document::new(Kind::Fgl, fgl_value(&gm(&BaseRing::Rationals, 6).unwrap())));
    round_trip(&Document::new(Kind::Census, census_value(&supersingular_census(13).unwrap())));
}

#[test]
fn malformed_documents_are_rejected() {
    for text in [
        r#"{"kind":"witt","payload":{},"version":"2"}"#,
        r#"{"kind":"witt","payload":{"p":3},"version":"1"}"#,
        r#"{"kind":"nope","payload":{},"version":"1"}"#,
        r#"{"kind":"witt","payload":{},"version":"1","extra":"x"}"#,
        "[1,2,3]",
    ] {
        let ok = Document::parse(text).and_then(|d| d.decode().map(|_| ()));
        assert!(ok.is_err(), "{text}");
    }
}
