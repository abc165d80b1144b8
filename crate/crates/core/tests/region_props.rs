//! Property tests for the region model against a naive character-table oracle.

use codemapper::region::{CharacterRange, FileText, Position};
use proptest::prelude::*;

/// Every character of `text` with its 1-based (line, col); a newline sits at
/// column `len + 1` of its line.
fn table(text: &str) -> Vec<(usize, usize, char)> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    for ch in text.chars() {
        out.push((line, col, ch));
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    out
}

fn text_strategy() -> impl Strategy<Value = String> {
    // small alphabet with multi-byte characters and frequent newlines
    prop::collection::vec(prop::sample::select(vec!['a', 'b', ' ', '\n', '\n', 'é', '→', '(', ')']), 0..60)
        .prop_map(|cs| cs.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn offsets_round_trip(text in text_strategy()) {
        let ft = FileText::new(&text);
        let tab = table(&text);
        prop_assert_eq!(ft.char_len(), tab.len());
        for (offset, &(line, col, _)) in tab.iter().enumerate() {
            let pos = Position::new(line, col);
            prop_assert_eq!(ft.position_of(offset), Some(pos));
            prop_assert_eq!(ft.offset_of(pos), Some(offset));
        }
        prop_assert_eq!(ft.position_of(tab.len()), None);
    }

    #[test]
    fn extraction_matches_oracle(text in text_strategy(), a in 0usize..70, b in 0usize..70, l1 in 1usize..8, c1 in 1usize..8, l2 in 1usize..8, c2 in 1usize..8) {
        let ft = FileText::new(&text);
        let tab = table(&text);
        // ranges built from table entries
        if !tab.is_empty() {
            let (i, j) = (a % tab.len(), b % tab.len());
            let (i, j) = (i.min(j), i.max(j));
            let (sl, sc, _) = tab[i];
            let (el, ec, ech) = tab[j];
            let range = CharacterRange::new(sl, sc, el, ec).unwrap();
            let valid = ech != '\n' && (tab[i].2 != '\n' || sl < el);
            match ft.extract(&range) {
                Ok(s) => {
                    prop_assert!(valid);
                    let expected: String = tab[i..=j].iter().map(|t| t.2).collect();
                    prop_assert_eq!(s, expected.as_str());
                    let iv = ft.to_abs_interval(&range).unwrap();
                    prop_assert_eq!((iv.start, iv.end), (i, j + 1));
                    prop_assert_eq!(ft.range_of(iv), Some(range));
                }
                Err(e) => {
                    prop_assert!(!valid);
                    prop_assert!(e.is_region_error());
                }
            }
        }
        // arbitrary coordinates: accepted exactly when the oracle can locate them
        if let Ok(range) = CharacterRange::new(l1, c1, l2, c2) {
            let find = |l: usize, c: usize| tab.iter().position(|t| t.0 == l && t.1 == c);
            let expected = match (find(l1, c1), find(l2, c2)) {
                (Some(i), Some(j)) if tab[j].2 != '\n' && (tab[i].2 != '\n' || l1 < l2) => {
                    Some(tab[i..=j].iter().map(|t| t.2).collect::<String>())
                }
                _ => None,
            };
            prop_assert_eq!(ft.extract(&range).ok().map(str::to_owned), expected);
        }
    }

    #[test]
    fn ranges_are_ordered_and_shift_consistently(l1 in 0usize..6, c1 in 0usize..6, l2 in 0usize..6, c2 in 0usize..6, d in -5i64..5) {
        match CharacterRange::new(l1, c1, l2, c2) {
            Ok(r) => {
                prop_assert!(r.start() <= r.end());
                prop_assert_eq!(r.tuple(), (l1, c1, l2, c2));
                match r.shift_lines(d) {
                    Some(s) => {
                        prop_assert_eq!(s.tuple(), ((l1 as i64 + d) as usize, c1, (l2 as i64 + d) as usize, c2));
                        prop_assert_eq!(s.shift_lines(-d), Some(r));
                    }
                    None => prop_assert!(l1 as i64 + d < 1),
                }
            }
            Err(_) => prop_assert!(l1 == 0 || c1 == 0 || l2 == 0 || c2 == 0 || (l1, c1) > (l2, c2)),
        }
    }
}

#[test]
fn crlf_is_normalized() {
    let ft = FileText::new("ab\r\ncd\r\n");
    assert_eq!(ft.line_count(), 2);
    assert_eq!(ft.extract(&CharacterRange::new(1, 2, 2, 1).unwrap()).unwrap(), "b\nc");
}

#[test]
fn range_json_uses_flat_fields() {
    let r = CharacterRange::new(3, 1, 4, 9).unwrap();
    let v = serde_json::to_value(r).unwrap();
    assert_eq!(v, serde_json::json!({"l1": 3, "c1": 1, "l2": 4, "c2": 9}));
    assert!(serde_json::from_value::<CharacterRange>(serde_json::json!({"l1": 4, "c1": 1, "l2": 3, "c2": 9})).is_err());
}
