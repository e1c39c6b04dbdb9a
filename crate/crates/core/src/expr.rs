//! Model templates: formulas over binary variables with `and`/`or` operator
//! slots, their parser, canonical rendering and evaluation.
//!
//! Template text follows
//!
//! ```text
//! template := sequence "=" ident
//! sequence := operand (slot operand)*
//! operand  := ident | "(" sequence ")"
//! slot     := "?" | "?" integer
//! ```
//!
//! Bare `?` slots are numbered left to right, taking the lowest ids not
//! claimed by an explicit `?N`. Within one flat sequence `and` binds tighter
//! than `or`; parenthesized groups are evaluated first.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{BmcmError, Result};

/// Largest slot count [`enumerate_assignments`] accepts by default.
pub const MAX_ENUMERATION_SLOTS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    And,
    Or,
}

impl Operator {
    pub fn opposite(self) -> Self {
        match self {
            Operator::And => Operator::Or,
            Operator::Or => Operator::And,
        }
    }

    pub fn apply(self, lhs: bool, rhs: bool) -> bool {
        match self {
            Operator::And => lhs && rhs,
            Operator::Or => lhs || rhs,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::And => "and",
            Operator::Or => "or",
        })
    }
}

/// One concrete operator per slot; index 0 fills slot 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OperatorAssignment(Vec<Operator>);

impl OperatorAssignment {
    pub fn new(ops: Vec<Operator>) -> Self {
        OperatorAssignment(ops)
    }

    /// Assignment number `index` in canonical binary counting order:
    /// slot 1 is the most significant bit, `And` = 0, `Or` = 1.
    pub fn from_index(index: u64, slot_count: usize) -> Self {
        let ops = (0..slot_count)
            .map(|slot| {
                let shift = slot_count - 1 - slot;
                if (index >> shift) & 1 == 1 {
                    Operator::Or
                } else {
                    Operator::And
                }
            })
            .collect();
        OperatorAssignment(ops)
    }

    pub fn ops(&self) -> &[Operator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Operator for a 1-based slot id.
    pub fn slot(&self, id: usize) -> Option<Operator> {
        id.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }
}

impl From<Vec<Operator>> for OperatorAssignment {
    fn from(ops: Vec<Operator>) -> Self {
        OperatorAssignment(ops)
    }
}

impl fmt::Display for OperatorAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, op) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{op}")?;
        }
        f.write_str(")")
    }
}

/// All `2^slot_count` assignments in canonical order.
pub fn enumerate_assignments(slot_count: usize) -> Result<Vec<OperatorAssignment>> {
    enumerate_assignments_with_limit(slot_count, MAX_ENUMERATION_SLOTS)
}

pub fn enumerate_assignments_with_limit(
    slot_count: usize,
    limit: usize,
) -> Result<Vec<OperatorAssignment>> {
    if slot_count > limit || slot_count >= 64 {
        return Err(BmcmError::Capacity {
            slots: slot_count,
            limit,
        });
    }
    Ok((0..1u64 << slot_count)
        .map(|index| OperatorAssignment::from_index(index, slot_count))
        .collect())
}

/// A template element. `V` is the variable representation: column names in a
/// parsed template, column indices once bound to a dataset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateItem<V = String> {
    Variable(V),
    /// 1-based slot id.
    Slot(usize),
    Group(Vec<TemplateItem<V>>),
}

/// Input bits keyed by column name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitRow {
    values: BTreeMap<String, bool>,
}

impl BitRow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, bit: bool) {
        self.values.insert(name.into(), bit);
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.values.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<bool> {
        self.get(name)
            .ok_or_else(|| BmcmError::MissingVariable(name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, bool)> for BitRow {
    fn from_iter<I: IntoIterator<Item = (S, bool)>>(iter: I) -> Self {
        BitRow {
            values: iter.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelTemplate {
    items: Vec<TemplateItem>,
    target: String,
    slot_count: usize,
}

impl ModelTemplate {
    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).parse_template()
    }

    pub fn items(&self) -> &[TemplateItem] {
        &self.items
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    /// Distinct variable names in order of first appearance.
    pub fn variables(&self) -> Vec<&str> {
        fn walk<'a>(items: &'a [TemplateItem], seen: &mut Vec<&'a str>) {
            for item in items {
                match item {
                    TemplateItem::Variable(name) => {
                        if !seen.contains(&name.as_str()) {
                            seen.push(name);
                        }
                    }
                    TemplateItem::Group(inner) => walk(inner, seen),
                    TemplateItem::Slot(_) => {}
                }
            }
        }
        let mut seen = Vec::new();
        walk(&self.items, &mut seen);
        seen
    }

    /// Replace every variable name through `resolve`, keeping the structure.
    pub fn bind<V, F>(&self, mut resolve: F) -> Result<Vec<TemplateItem<V>>>
    where
        F: FnMut(&str) -> Result<V>,
    {
        fn walk<V, F>(items: &[TemplateItem], resolve: &mut F) -> Result<Vec<TemplateItem<V>>>
        where
            F: FnMut(&str) -> Result<V>,
        {
            items
                .iter()
                .map(|item| {
                    Ok(match item {
                        TemplateItem::Variable(name) => TemplateItem::Variable(resolve(name)?),
                        TemplateItem::Slot(id) => TemplateItem::Slot(*id),
                        TemplateItem::Group(inner) => TemplateItem::Group(walk(inner, resolve)?),
                    })
                })
                .collect()
        }
        walk(&self.items, &mut resolve)
    }

    /// Evaluate the template's right-hand side for one row.
    pub fn evaluate(&self, assignment: &OperatorAssignment, row: &BitRow) -> Result<bool> {
        self.check_assignment(assignment)?;
        // Resolve every variable up front so a missing one is reported even
        // when evaluation would not have reached it.
        let bound = self.bind(|name| row.require(name))?;
        Ok(evaluate_items(&bound, assignment.ops(), &|bit: &bool| *bit))
    }

    pub fn check_assignment(&self, assignment: &OperatorAssignment) -> Result<()> {
        if assignment.len() != self.slot_count {
            return Err(BmcmError::AssignmentLength {
                expected: self.slot_count,
                got: assignment.len(),
            });
        }
        Ok(())
    }
}

impl FromStr for ModelTemplate {
    type Err = BmcmError;

    fn from_str(s: &str) -> Result<Self> {
        ModelTemplate::parse(s)
    }
}

impl fmt::Display for ModelTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_items(f, &self.items)?;
        write!(f, " = {}", self.target)
    }
}

fn write_items(f: &mut fmt::Formatter<'_>, items: &[TemplateItem]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        match item {
            TemplateItem::Variable(name) => f.write_str(name)?,
            TemplateItem::Slot(id) => write!(f, "?{id}")?,
            TemplateItem::Group(inner) => {
                f.write_str("(")?;
                write_items(f, inner)?;
                f.write_str(")")?;
            }
        }
    }
    Ok(())
}

/// Evaluate a well-formed item sequence. `ops[i]` fills slot `i + 1`.
///
/// Runs of `and` are conjoined first, then the runs are disjoined.
pub fn evaluate_items<V, L>(items: &[TemplateItem<V>], ops: &[Operator], leaf: &L) -> bool
where
    L: Fn(&V) -> bool,
{
    let operand = |item: &TemplateItem<V>| match item {
        TemplateItem::Variable(v) => leaf(v),
        TemplateItem::Group(inner) => evaluate_items(inner, ops, leaf),
        TemplateItem::Slot(_) => unreachable!("slot in operand position"),
    };

    let mut iter = items.iter();
    let Some(first) = iter.next() else {
        return false;
    };
    let mut disjunction = false;
    let mut run = operand(first);
    while let (Some(TemplateItem::Slot(id)), Some(next)) = (iter.next(), iter.next()) {
        let value = operand(next);
        match ops[id - 1] {
            Operator::And => run = run && value,
            Operator::Or => {
                disjunction = disjunction || run;
                run = value;
            }
        }
    }
    disjunction || run
}

/// The six three-variable shapes: three flat orderings, then three grouped.
pub fn enumerate_models<S: AsRef<str>>(
    variables: &[S],
    target: &str,
) -> Result<Vec<ModelTemplate>> {
    let [a, b, c] = variables else {
        return Err(BmcmError::UnsupportedArity(variables.len()));
    };
    let (a, b, c) = (a.as_ref(), b.as_ref(), c.as_ref());
    [
        format!("{a} ?1 {b} ?2 {c} = {target}"),
        format!("{a} ?1 {c} ?2 {b} = {target}"),
        format!("{b} ?1 {a} ?2 {c} = {target}"),
        format!("({a} ?1 {b}) ?2 {c} = {target}"),
        format!("({c} ?1 {a}) ?2 {b} = {target}"),
        format!("({b} ?1 {c}) ?2 {a} = {target}"),
    ]
    .iter()
    .map(|text| ModelTemplate::parse(text))
    .collect()
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Slot(Option<usize>),
    Open,
    Close,
    Equals,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("`{name}`"),
            Token::Slot(Some(id)) => format!("slot `?{id}`"),
            Token::Slot(None) => "slot `?`".to_string(),
            Token::Open => "`(`".to_string(),
            Token::Close => "`)`".to_string(),
            Token::Equals => "`=`".to_string(),
            Token::End => "end of input".to_string(),
        }
    }
}

/// Slot as written, before auto-numbering.
enum RawItem {
    Variable(String),
    Slot,
    Group(Vec<RawItem>),
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    peeked: Option<(usize, Token)>,
    /// Explicit id (or None) per slot, in textual order.
    slots: Vec<(usize, Option<usize>)>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            pos: 0,
            peeked: None,
            slots: Vec::new(),
        }
    }

    fn error<T>(&self, pos: usize, message: impl Into<String>) -> Result<T> {
        Err(BmcmError::Syntax {
            pos,
            message: message.into(),
        })
    }

    fn lex(&mut self) -> Result<(usize, Token)> {
        let bytes = self.text.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&byte) = bytes.get(start) else {
            return Ok((start, Token::End));
        };
        let token = match byte {
            b'(' => {
                self.pos += 1;
                Token::Open
            }
            b')' => {
                self.pos += 1;
                Token::Close
            }
            b'=' => {
                self.pos += 1;
                Token::Equals
            }
            b'?' => {
                self.pos += 1;
                let digits = self.pos;
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.pos == digits {
                    Token::Slot(None)
                } else {
                    match self.text[digits..self.pos].parse::<usize>() {
                        Ok(id) if id >= 1 => Token::Slot(Some(id)),
                        _ => return self.error(start, "slot id must be a positive integer"),
                    }
                }
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while self.pos < bytes.len()
                    && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Token::Ident(self.text[start..self.pos].to_string())
            }
            _ => {
                let ch = self.text[start..].chars().next().unwrap_or('?');
                return self.error(start, format!("unexpected character {ch:?}"));
            }
        };
        Ok((start, token))
    }

    fn peek(&mut self) -> Result<&(usize, Token)> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lex()?);
        }
        Ok(self.peeked.as_ref().expect("peeked"))
    }

    fn next(&mut self) -> Result<(usize, Token)> {
        match self.peeked.take() {
            Some(tok) => Ok(tok),
            None => self.lex(),
        }
    }

    fn parse_template(mut self) -> Result<ModelTemplate> {
        let raw = self.parse_sequence()?;
        let (pos, tok) = self.next()?;
        if tok != Token::Equals {
            return self.error(pos, format!("expected `=`, found {}", tok.describe()));
        }
        let (pos, tok) = self.next()?;
        let target = match tok {
            Token::Ident(name) => name,
            other => {
                return self.error(
                    pos,
                    format!("expected target name, found {}", other.describe()),
                )
            }
        };
        let (pos, tok) = self.next()?;
        if tok != Token::End {
            return self.error(pos, format!("unexpected {} after target", tok.describe()));
        }

        let ids = self.number_slots()?;
        let slot_count = ids.len();
        let mut ids = ids.into_iter();
        let mut items = finish(raw, &mut ids);
        // A single parenthesized operand at top level is just the operand.
        while let [TemplateItem::Group(_)] = items.as_slice() {
            let Some(TemplateItem::Group(inner)) = items.pop() else {
                unreachable!()
            };
            items = inner;
        }

        let template = ModelTemplate {
            items,
            target,
            slot_count,
        };
        if let Some(name) = template
            .variables()
            .into_iter()
            .find(|v| *v == template.target)
        {
            return Err(BmcmError::VariableIsTarget(name.to_string()));
        }
        Ok(template)
    }

    /// Resolve ids for all slots in textual order.
    fn number_slots(&self) -> Result<Vec<usize>> {
        let count = self.slots.len();
        let mut taken = BTreeSet::new();
        for &(_, explicit) in &self.slots {
            if let Some(id) = explicit {
                if !taken.insert(id) {
                    return Err(BmcmError::DuplicateSlot(id));
                }
                if id > count {
                    return Err(BmcmError::SlotOutOfRange {
                        found: id,
                        expected: count,
                    });
                }
            }
        }
        let mut free = (1..=count).filter(|id| !taken.contains(id));
        Ok(self
            .slots
            .iter()
            .map(|&(_, explicit)| explicit.unwrap_or_else(|| free.next().expect("free id")))
            .collect())
    }

    fn parse_sequence(&mut self) -> Result<Vec<RawItem>> {
        let mut items = vec![self.parse_operand()?];
        loop {
            let (pos, tok) = self.peek()?.clone();
            let Token::Slot(explicit) = tok else {
                break;
            };
            self.next()?;
            self.slots.push((pos, explicit));
            items.push(RawItem::Slot);
            items.push(self.parse_operand()?);
        }
        Ok(items)
    }

    fn parse_operand(&mut self) -> Result<RawItem> {
        let (pos, tok) = self.next()?;
        match tok {
            Token::Ident(name) => Ok(RawItem::Variable(name)),
            Token::Open => {
                if let (close, Token::Close) = self.peek()?.clone() {
                    return self.error(close, "empty group");
                }
                let mut inner = self.parse_sequence()?;
                let (pos, tok) = self.next()?;
                if tok != Token::Close {
                    return self.error(pos, format!("expected `)`, found {}", tok.describe()));
                }
                if inner.len() == 1 {
                    Ok(inner.pop().expect("one operand"))
                } else {
                    Ok(RawItem::Group(inner))
                }
            }
            Token::Slot(_) => self.error(pos, "a slot must sit between two operands"),
            other => self.error(
                pos,
                format!("expected variable or `(`, found {}", other.describe()),
            ),
        }
    }
}

fn finish(raw: Vec<RawItem>, ids: &mut std::vec::IntoIter<usize>) -> Vec<TemplateItem> {
    raw.into_iter()
        .map(|item| match item {
            RawItem::Variable(name) => TemplateItem::Variable(name),
            RawItem::Slot => TemplateItem::Slot(ids.next().expect("slot id")),
            RawItem::Group(inner) => TemplateItem::Group(finish(inner, ids)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Operator::{And, Or};

    fn var(name: &str) -> TemplateItem {
        TemplateItem::Variable(name.to_string())
    }

    fn row(bits: &[(&str, bool)]) -> BitRow {
        bits.iter().map(|&(k, v)| (k, v)).collect()
    }

    #[test]
    fn parses_flat_model() {
        let t = ModelTemplate::parse("x1 ? x2 ? x3 = xO").unwrap();
        assert_eq!(
            t.items(),
            &[
                var("x1"),
                TemplateItem::Slot(1),
                var("x2"),
                TemplateItem::Slot(2),
                var("x3")
            ]
        );
        assert_eq!(t.target(), "xO");
        assert_eq!(t.slot_count(), 2);
    }

    #[test]
    fn parses_grouped_model() {
        let t = ModelTemplate::parse("(x1 ? x2) ? x3 = xO").unwrap();
        assert_eq!(
            t.items(),
            &[
                TemplateItem::Group(vec![var("x1"), TemplateItem::Slot(1), var("x2")]),
                TemplateItem::Slot(2),
                var("x3")
            ]
        );
    }

    #[test]
    fn single_variable_model() {
        let t = ModelTemplate::parse("x1 = xO").unwrap();
        assert_eq!(t.items(), &[var("x1")]);
        assert_eq!(t.slot_count(), 0);
    }

    #[test]
    fn adjacent_slots_rejected() {
        let err = ModelTemplate::parse("x1 ? ? x2 = xO").unwrap_err();
        assert!(matches!(err, BmcmError::Syntax { pos: 5, .. }), "{err:?}");
    }

    #[test]
    fn leading_and_trailing_slots_rejected() {
        assert!(matches!(
            ModelTemplate::parse("? x1 = xO"),
            Err(BmcmError::Syntax { .. })
        ));
        assert!(matches!(
            ModelTemplate::parse("x1 ? = xO"),
            Err(BmcmError::Syntax { .. })
        ));
    }

    #[test]
    fn empty_group_rejected() {
        let err = ModelTemplate::parse("x1 ? () = xO").unwrap_err();
        assert_eq!(
            err,
            BmcmError::Syntax {
                pos: 6,
                message: "empty group".into()
            }
        );
    }

    #[test]
    fn duplicate_and_out_of_range_ids() {
        assert_eq!(
            ModelTemplate::parse("a ?1 b ?1 c = y").unwrap_err(),
            BmcmError::DuplicateSlot(1)
        );
        assert!(matches!(
            ModelTemplate::parse("a ?3 b ? c = y"),
            Err(BmcmError::SlotOutOfRange {
                found: 3,
                expected: 2
            })
        ));
    }

    #[test]
    fn auto_ids_fill_lowest_free() {
        let t = ModelTemplate::parse("a ? b ?1 c = y").unwrap();
        assert_eq!(t.to_string(), "a ?2 b ?1 c = y");
    }

    #[test]
    fn redundant_parentheses_collapse() {
        let t = ModelTemplate::parse("((a ? b)) = y").unwrap();
        assert_eq!(t.to_string(), "a ?1 b = y");
        let t = ModelTemplate::parse("(a) ? (b) = y").unwrap();
        assert_eq!(t.to_string(), "a ?1 b = y");
    }

    #[test]
    fn target_cannot_be_an_operand() {
        assert_eq!(
            ModelTemplate::parse("a ? y = y").unwrap_err(),
            BmcmError::VariableIsTarget("y".into())
        );
    }

    #[test]
    fn trailing_garbage_and_missing_target() {
        assert!(matches!(
            ModelTemplate::parse("a ? b"),
            Err(BmcmError::Syntax { pos: 5, .. })
        ));
        assert!(matches!(
            ModelTemplate::parse("a ? b = y z"),
            Err(BmcmError::Syntax { pos: 10, .. })
        ));
        assert!(matches!(
            ModelTemplate::parse("a & b = y"),
            Err(BmcmError::Syntax { pos: 2, .. })
        ));
    }

    #[test]
    fn and_binds_tighter_than_or() {
        let t = ModelTemplate::parse("x1 ? x2 ? x3 = xO").unwrap();
        let r = row(&[("x1", false), ("x2", true), ("x3", true)]);
        assert!(t.evaluate(&vec![Or, And].into(), &r).unwrap());
        // (0 and 1) or 1
        let r = row(&[("x1", false), ("x2", true), ("x3", true)]);
        assert!(t.evaluate(&vec![And, Or].into(), &r).unwrap());
        let r = row(&[("x1", true), ("x2", true), ("x3", false)]);
        assert!(t.evaluate(&vec![And, Or].into(), &r).unwrap());
        assert!(!t
            .evaluate(
                &vec![Or, And].into(),
                &row(&[("x1", false), ("x2", true), ("x3", false)])
            )
            .unwrap());
    }

    #[test]
    fn groups_override_precedence() {
        let t = ModelTemplate::parse("(x1 ? x2) ? x3 = xO").unwrap();
        let r = row(&[("x1", true), ("x2", false), ("x3", false)]);
        assert!(!t.evaluate(&vec![Or, And].into(), &r).unwrap());
    }

    #[test]
    fn evaluate_errors() {
        let t = ModelTemplate::parse("x1 ? x2 = xO").unwrap();
        let r = row(&[("x1", true)]);
        assert_eq!(
            t.evaluate(&vec![Or].into(), &r).unwrap_err(),
            BmcmError::MissingVariable("x2".into())
        );
        let r = row(&[("x1", true), ("x2", true)]);
        assert_eq!(
            t.evaluate(&vec![Or, Or].into(), &r).unwrap_err(),
            BmcmError::AssignmentLength {
                expected: 1,
                got: 2
            }
        );
    }

    #[test]
    fn assignments_in_binary_order() {
        let all = enumerate_assignments(2).unwrap();
        let ops: Vec<_> = all.iter().map(|a| a.ops().to_vec()).collect();
        assert_eq!(
            ops,
            vec![vec![And, And], vec![And, Or], vec![Or, And], vec![Or, Or]]
        );
        assert_eq!(
            enumerate_assignments(0).unwrap(),
            vec![OperatorAssignment::new(vec![])]
        );
        let three = enumerate_assignments(3).unwrap();
        assert_eq!(three.len(), 8);
        assert_eq!(
            three.iter().collect::<std::collections::HashSet<_>>().len(),
            8
        );
    }

    #[test]
    fn assignment_capacity_limit() {
        assert_eq!(
            enumerate_assignments(21).unwrap_err(),
            BmcmError::Capacity {
                slots: 21,
                limit: 20
            }
        );
        assert_eq!(
            enumerate_assignments_with_limit(4, 3).unwrap_err(),
            BmcmError::Capacity { slots: 4, limit: 3 }
        );
    }

    #[test]
    fn six_models() {
        let models = enumerate_models(&["x1", "x2", "x3"], "xO").unwrap();
        let text: Vec<_> = models.iter().map(|m| m.to_string()).collect();
        assert_eq!(
            text,
            [
                "x1 ?1 x2 ?2 x3 = xO",
                "x1 ?1 x3 ?2 x2 = xO",
                "x2 ?1 x1 ?2 x3 = xO",
                "(x1 ?1 x2) ?2 x3 = xO",
                "(x3 ?1 x1) ?2 x2 = xO",
                "(x2 ?1 x3) ?2 x1 = xO",
            ]
        );
        let renamed = enumerate_models(&["a", "b", "c"], "y").unwrap();
        assert_eq!(renamed[5].to_string(), "(b ?1 c) ?2 a = y");
        assert_eq!(
            enumerate_models(&["x1", "x2"], "xO").unwrap_err(),
            BmcmError::UnsupportedArity(2)
        );
    }

    #[test]
    fn variables_in_first_appearance_order() {
        let t = ModelTemplate::parse("(c ? a) ? b ? a = y").unwrap();
        assert_eq!(t.variables(), vec!["c", "a", "b"]);
    }
}
