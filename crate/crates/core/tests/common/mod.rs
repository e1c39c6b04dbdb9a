//! Reference implementations used only by tests. They share no code path
//! with the library routines they check.

#![allow(dead_code)]

use bmcm::expr::{ModelTemplate, Operator, OperatorAssignment, TemplateItem};

/// Render the template with operators substituted, e.g. `x1 | x2 & x3`.
pub fn substitute(template: &ModelTemplate, assignment: &OperatorAssignment) -> String {
    fn walk(items: &[TemplateItem], ops: &[Operator], out: &mut String) {
        for item in items {
            match item {
                TemplateItem::Variable(name) => out.push_str(name),
                TemplateItem::Slot(id) => out.push_str(match ops[id - 1] {
                    Operator::And => " & ",
                    Operator::Or => " | ",
                }),
                TemplateItem::Group(inner) => {
                    out.push('(');
                    walk(inner, ops, out);
                    out.push(')');
                }
            }
        }
    }
    let mut out = String::new();
    walk(template.items(), assignment.ops(), &mut out);
    out
}

/// Evaluate a `&`/`|` expression with standard precedence by precedence
/// climbing over characters.
pub fn naive_eval(text: &str, lookup: &dyn Fn(&str) -> bool) -> bool {
    let tokens: Vec<String> = {
        let mut tokens = Vec::new();
        let mut chars = text.chars().peekable();
        while let Some(&c) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
            } else if "&|()".contains(c) {
                tokens.push(c.to_string());
                chars.next();
            } else {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        ident.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(ident);
            }
        }
        tokens
    };

    fn or_expr(t: &[String], i: &mut usize, lookup: &dyn Fn(&str) -> bool) -> bool {
        let mut v = and_expr(t, i, lookup);
        while *i < t.len() && t[*i] == "|" {
            *i += 1;
            let rhs = and_expr(t, i, lookup);
            v = v || rhs;
        }
        v
    }
    fn and_expr(t: &[String], i: &mut usize, lookup: &dyn Fn(&str) -> bool) -> bool {
        let mut v = atom(t, i, lookup);
        while *i < t.len() && t[*i] == "&" {
            *i += 1;
            let rhs = atom(t, i, lookup);
            v = v && rhs;
        }
        v
    }
    fn atom(t: &[String], i: &mut usize, lookup: &dyn Fn(&str) -> bool) -> bool {
        let tok = &t[*i];
        *i += 1;
        if tok == "(" {
            let v = or_expr(t, i, lookup);
            assert_eq!(t[*i], ")");
            *i += 1;
            v
        } else {
            lookup(tok)
        }
    }

    let mut i = 0;
    let v = or_expr(&tokens, &mut i, lookup);
    assert_eq!(i, tokens.len(), "unparsed tail in {text}");
    v
}

fn choose(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Two-sided Fisher p by enumerating every table with the observed margins
/// in exact integer arithmetic. A table counts when its probability is at
/// most `(1 + 1e-7)` times the observed one.
pub fn fisher_by_enumeration(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let (r1, r2, c1) = (a + b, c + d, a + c);
    let n = r1 + r2;
    let weight = |x: u64| choose(r1, x) * choose(r2, c1 - x);
    let observed = weight(a);
    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);
    let kept: u128 = (lo..=hi)
        .map(weight)
        .filter(|&w| w * 10_000_000 <= observed * 10_000_001)
        .sum();
    kept as f64 / choose(n, c1) as f64
}

/// Expected slot-1 faithful (and, or) counts per row for `x1 ? x2 ? x3`
/// on the dependent cohort, by brute force over the eight input patterns
/// with x1 ~ Bernoulli(1/2) (exact half), x2, x3 fair coins and xO = x1.
/// Null rows are skipped. Evaluation is by textual substitution.
pub fn dependent_slot1_expectation() -> (f64, f64) {
    let mut and = 0.0;
    let mut or = 0.0;
    for pattern in 0..8u8 {
        let bits = [pattern & 4 != 0, pattern & 2 != 0, pattern & 1 != 0];
        if bits.iter().all(|&b| b) || bits.iter().all(|&b| !b) {
            continue;
        }
        let outcome = bits[0];
        let lookup = |name: &str| match name {
            "x1" => bits[0],
            "x2" => bits[1],
            "x3" => bits[2],
            other => panic!("unknown {other}"),
        };
        for (op1, sym1) in [(Operator::And, "&"), (Operator::Or, "|")] {
            for sym2 in ["&", "|"] {
                let f = naive_eval(&format!("x1 {sym1} x2 {sym2} x3"), &lookup);
                if f == outcome {
                    match op1 {
                        Operator::And => and += 1.0 / 8.0,
                        Operator::Or => or += 1.0 / 8.0,
                    }
                }
            }
        }
    }
    (and, or)
}
