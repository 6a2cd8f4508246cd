use super::lexer::tokenize;
use super::*;
use crate::ars::Trace;
use crate::scenarios::TrafficArena;

const A_LC: &str = include_str!("../../tests/data/a_lc.ars");
const A_C: &str = include_str!("../../tests/data/a_c.ars");
const EVENTUAL: &str = include_str!("../../tests/data/eventual.ars");

fn first_error(src: &str) -> Diagnostic {
    parse(src).expect_err("document should be rejected").remove(0)
}

#[test]
fn a_lc_document_reproduces_greatmost() {
    let doc = parse(A_LC).unwrap();
    let m = doc.model();
    let gm = m.strategy("gm").unwrap();
    assert_eq!(
        gm.finite_support(&m.ars, 5, None).render(&m.ars),
        ["a -phi2-> c", "b -phi4-> d"]
    );
    assert_eq!(doc.queries().count(), 5);
}

#[test]
fn strategy_references_resolve_to_earlier_definitions() {
    let doc = parse(A_LC).unwrap();
    let m = doc.model();
    let both = m.strategy("both").unwrap();
    let a = m.object("a").unwrap();
    let z = both.finite_support(&m.ars, 6, Some(&[a]));
    assert_eq!(z.render(&m.ars), ["a -phi1-> b", "a -phi1-> b -phi3-> a"]);
}

#[test]
fn functionality_violation() {
    let src = "ars {\n  objects: a, b;\n  labels: l;\n  steps: (a, l, b), (a, l, a);\n}\n";
    let d = first_error(src);
    assert_eq!((d.line, d.column), (4, 21));
    assert!(d.message.contains("has two targets"), "{}", d.message);
}

#[test]
fn cyclic_order() {
    let src = "ars { objects: a; labels: x; steps: (a, x, a); }\norder o { x < x; }\n";
    let d = first_error(src);
    assert_eq!((d.line, d.column), (2, 7));
    assert!(d.message.contains("irreflexive"));
}

#[test]
fn undefined_names() {
    let base = "ars { objects: a; labels: x; steps: (a, x, a); }\n";
    let cases = [
        ("strategy s = greatmost(o);", "undefined order"),
        ("strategy s = t;", "undefined strategy"),
        ("accept f = at(b);", "undeclared object"),
        ("accept f = word(x y);", "unknown label"),
        ("query apply s from a;", "undefined strategy"),
        ("order o { x < y; }", "undeclared label"),
    ];
    for (tail, msg) in cases {
        let d = first_error(&format!("{base}{tail}\n"));
        assert!(d.message.contains(msg), "{tail}: {}", d.message);
        assert_eq!(d.line, 2);
    }
}

#[test]
fn unknown_label_points_into_the_word() {
    let src = "ars { objects: a; labels: x; steps: (a, x, a); }\naccept f = word(x y);\n";
    let d = first_error(src);
    assert_eq!((d.line, d.column), (2, 19));
}

#[test]
fn word_syntax_errors_are_positioned() {
    let src = "ars { objects: a; labels: x; steps: (a, x, a); }\naccept f = word(x | );\n";
    let d = first_error(src);
    assert_eq!((d.line, d.column), (2, 21));
}

#[test]
fn keywords_are_reserved() {
    let d = first_error("ars { objects: depth; labels: x; steps: (depth, x, depth); }");
    assert!(d.message.contains("keyword `depth`"));
}

#[test]
fn structure_errors() {
    assert!(first_error("").message.contains("`ars`"));
    assert!(first_error("strategy s = universal;").message.contains("must come first"));
    let twice = "ars { objects: a; labels: x; steps: (a, x, a); }\nars { objects: a; labels: x; steps: (a, x, a); }";
    assert!(first_error(twice).message.contains("exactly one"));
    let zero = "ars { objects: a; labels: x; steps: (a, x, a); }\nstrategy s = universal;\nquery enumerate s depth 0;";
    assert!(first_error(zero).message.contains("at least 1"));
}

#[test]
fn nesting_limit() {
    let mut src = String::from("ars { objects: a; labels: x; steps: (a, x, a); }\naccept f = ");
    src += &"not(".repeat(MAX_NESTING + 5);
    src += "true";
    src += &")".repeat(MAX_NESTING + 5);
    src += ";";
    assert!(first_error(&src).message.contains("nested deeper"));
}

#[test]
fn trace_accept_condition() {
    let doc = parse(A_LC).unwrap();
    let m = doc.model();
    let z = m.strategy("one").unwrap().generate(&m.ars, 3, None);
    assert_eq!(z.render(&m.ars), ["a -phi1-> b -phi3-> a -phi2-> c"]);

    let bad = "ars { objects: a, b; labels: x; steps: (a, x, b); }\naccept f = trace(b, x, a);";
    assert!(first_error(bad).message.contains("incompatible"));
    let _ = Trace::empty(m.object("a").unwrap());
}

#[test]
fn canonical_form_is_a_fixpoint() {
    for src in [A_LC, A_C, EVENTUAL] {
        let doc = parse(src).unwrap();
        let once = serialize(&doc);
        let reparsed = parse(&once).unwrap();
        assert_eq!(reparsed, doc);
        assert_eq!(serialize(&reparsed), once);
        assert!(!once.contains('\r'));
    }
}

#[test]
fn canonical_form_groups_sections() {
    let src = "query enumerate depth 2;";
    let doc = parse(&format!("ars {{ objects: a; labels: x; steps: (a, x, a); }}\n{src}\nstrategy s = universal;"))
        .unwrap();
    assert_eq!(
        serialize(&doc),
        "ars {\n  objects: a;\n  labels: x;\n  steps: (a, x, a);\n}\nstrategy s = universal;\nquery enumerate depth 2;\n"
    );
}

#[test]
fn traffic_document_round_trips() {
    let text = TrafficArena::new(1).document();
    let doc = parse(&text).unwrap();
    assert_eq!(doc.ars().object_count(), 16);
    let once = serialize(&doc);
    assert_eq!(parse(&once).unwrap(), doc);
    assert_eq!(serialize(&parse(&once).unwrap()), once);
}

fn delete(src: &str, tok: super::lexer::Token) -> String {
    let mut mutated = String::from(&src[..tok.start]);
    mutated.push_str(&src[tok.end..]);
    mutated
}

/// Where the token after `i` lands once token `i` is removed.
fn shifted(toks: &[super::lexer::Token], i: usize) -> (usize, usize) {
    let (gone, next) = (toks[i], toks[i + 1]);
    if next.line == gone.line {
        (next.line, next.column - (gone.end - gone.start))
    } else {
        (next.line, next.column)
    }
}

#[test]
fn deleting_a_token_is_reported_at_or_after_the_gap() {
    for src in [A_LC, A_C, EVENTUAL] {
        let toks = tokenize(src).unwrap();
        for i in 0..toks.len() - 1 {
            let mutated = delete(src, toks[i]);
            if tokenize(&mutated).unwrap().len() != toks.len() - 1 {
                continue;
            }
            let Err(diags) = parse(&mutated) else { continue };
            let d = &diags[0];
            assert!(
                (d.line, d.column) >= shifted(&toks, i),
                "deleting `{}` at {}:{} reported at {}:{}",
                toks[i].text(src),
                toks[i].line,
                toks[i].column,
                d.line,
                d.column
            );
        }
    }
}

#[test]
fn deleting_a_symbol_points_at_the_next_token() {
    let src = "ars { objects: a, b; labels: x; steps: (a, x, b); }\nstrategy s = restrict({x});";
    let toks = tokenize(src).unwrap();
    for i in 0..toks.len() - 1 {
        if toks[i].kind != super::lexer::Kind::Sym {
            continue;
        }
        let d = first_error(&delete(src, toks[i]));
        assert_eq!((d.line, d.column), shifted(&toks, i), "deleting `{}`", toks[i].text(src));
    }
}
