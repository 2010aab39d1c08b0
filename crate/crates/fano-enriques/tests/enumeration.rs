use fano_enriques::enumeration::{check_restrictions, enumerate_all, EnumerationOptions};

#[test]
fn counts_by_order() {
    let all = enumerate_all(EnumerationOptions::default());
    let counts: Vec<(usize, usize)> = all
        .iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|(r, v)| (*r, v.len()))
        .collect();
    assert_eq!(counts, [(2, 20), (3, 7), (4, 5), (5, 4), (6, 2), (8, 1)]);
    for (_, v) in &all {
        for c in v {
            assert!(c.is_canonical(), "{c}");
            assert!(
                check_restrictions(c, EnumerationOptions::default()).admissible(),
                "{c}"
            );
        }
    }
}

#[test]
fn strict_mode_gives_same_list() {
    let loose = enumerate_all(EnumerationOptions::default());
    let strict = enumerate_all(EnumerationOptions { strict_r5: true });
    assert_eq!(loose, strict);
}
