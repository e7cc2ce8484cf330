use dynsig_core::signatures::{ABSENT, PRESENT};
use dynsig_core::{compile_pattern, DynamicPattern, LogWeight, SignatureSpec};
use regex::Regex;

fn oracle(p: DynamicPattern) -> Regex {
    Regex::new(match p {
        DynamicPattern::Absence => "^0+$",
        DynamicPattern::Persistence => "^1+$",
        DynamicPattern::Start => "^1+0+$",
        DynamicPattern::End => "^0+1+$",
    })
    .unwrap()
}

#[test]
fn compiled_patterns_match_regular_expressions() {
    for p in DynamicPattern::ALL {
        let machine = compile_pattern(p);
        let re = oracle(p);
        for len in 1..=10usize {
            for mask in 0u32..(1 << len) {
                let bits: String = (0..len).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect();
                let syms: Vec<u32> = bits.chars().map(|c| if c == '1' { PRESENT } else { ABSENT }).collect();
                assert_eq!(machine.accepts_input(&syms).unwrap(), re.is_match(&bits), "{p:?} on {bits}");
            }
        }
    }
}

#[test]
fn compiled_patterns_are_unit_weight_acceptors() {
    for p in DynamicPattern::ALL {
        let m = compile_pattern(p);
        assert!(m.edges().iter().all(|e| e.input == e.output && e.weight == LogWeight::ONE));
    }
}

#[test]
fn staticize_keeps_keys_and_order() {
    use DynamicPattern::*;
    let s = SignatureSpec::new("x", [("c", End), ("a", Persistence), ("b", Start), ("d", Absence)]).unwrap();
    let st = s.staticize();
    let keys = |s: &SignatureSpec| s.attributes().iter().map(|(n, _)| n.clone()).collect::<Vec<_>>();
    assert_eq!(keys(&s), keys(&st));
    assert!(st.attributes().iter().all(|(_, p)| !p.is_dynamic()));
    assert_eq!(st.staticize(), st);
}
