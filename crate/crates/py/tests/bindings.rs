use alcove_sheaves_py::{bm_stalks, check, export, kl_polynomial};

#[test]
fn polynomials_as_maps() {
    // Ã1: h_{e,x} = v^{ℓ(x)}
    assert_eq!(kl_polynomial("A1", "e", "s0s1s0", 10).unwrap().into_iter().collect::<Vec<_>>(), vec![(3, 1)]);
    assert!(kl_polynomial("A1", "s0s1", "s0", 10).unwrap().is_empty());
    assert_eq!(kl_polynomial("X9", "e", "e", 10).unwrap_err().kind(), "unknown_type");
}

#[test]
fn stalks_of_b_s() {
    let rows = bm_stalks("A1", "s1", 10).unwrap();
    assert_eq!(rows.len(), 2);
    // v^{ℓ(y)−ℓ(x)} h_{y,x} = 1 at both vertices
    for (_, _, p) in rows {
        assert_eq!(p.into_iter().collect::<Vec<_>>(), vec![(0, 1)]);
    }
}

#[test]
fn reports() {
    assert!(export("dot", "s0", None).unwrap().text.starts_with("graph moment {"));
    let cfg = r#"{"type":"A2","seed":3}"#;
    let r = check(2, Some(cfg)).unwrap();
    assert!(r.ok);
    assert_eq!(r.text, check(2, Some(cfg)).unwrap().text);
    assert!(check(2, Some(r#"{"bogus":1}"#)).is_err());
}
