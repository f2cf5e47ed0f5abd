//! CCG categories and the combinators that join them.
//!
//! Category strings use `/` and `\` as slashes. Slashes associate to the
//! left, so `S\NP/NP` is `(S\NP)/NP`; parentheses override. Atoms may carry
//! a single bracketed feature (`S[dcl]`), which is compared literally.
//!
//! Argument slots are numbered from the innermost argument outwards: in
//! `(S\NP)/NP` the subject is slot 1 and the object slot 2.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn slash(self) -> char {
        match self {
            Direction::Forward => '/',
            Direction::Backward => '\\',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Atom {
        name: String,
        feature: Option<String>,
    },
    Functor {
        result: Box<Category>,
        direction: Direction,
        argument: Box<Category>,
    },
}

/// How a binary node's category follows from its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryRule {
    ForwardApplication,
    BackwardApplication,
    ForwardComposition,
    BackwardComposition,
    /// `conj X => X[conj]`
    ConjunctMarking,
    /// `X X[conj] => X`
    Coordination,
    /// `, X => X` or `X . => X`
    LeftPunctuation,
    RightPunctuation,
}

const PUNCTUATION: &[&str] = &[",", ".", ";", ":"];

impl Category {
    pub fn atom(name: &str) -> Category {
        Category::Atom {
            name: name.to_string(),
            feature: None,
        }
    }

    pub fn atom_with_feature(name: &str, feature: &str) -> Category {
        Category::Atom {
            name: name.to_string(),
            feature: Some(feature.to_string()),
        }
    }

    pub fn functor(result: Category, direction: Direction, argument: Category) -> Category {
        Category::Functor {
            result: Box::new(result),
            direction,
            argument: Box::new(argument),
        }
    }

    pub fn forward(result: Category, argument: Category) -> Category {
        Category::functor(result, Direction::Forward, argument)
    }

    pub fn backward(result: Category, argument: Category) -> Category {
        Category::functor(result, Direction::Backward, argument)
    }

    pub fn parse(text: &str) -> Result<Category> {
        Parser::new(text).parse()
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Category::Atom { .. })
    }

    pub fn is_functor(&self) -> bool {
        !self.is_atom()
    }

    /// Number of argument slots on the spine.
    pub fn arity(&self) -> usize {
        let mut n = 0;
        let mut cur = self;
        while let Category::Functor { result, .. } = cur {
            n += 1;
            cur = result;
        }
        n
    }

    /// The atom at the bottom of the result spine (`S` for `(S\NP)/NP`).
    pub fn target(&self) -> &Category {
        let mut cur = self;
        while let Category::Functor { result, .. } = cur {
            cur = result;
        }
        cur
    }

    pub fn result(&self) -> Option<&Category> {
        match self {
            Category::Functor { result, .. } => Some(result),
            Category::Atom { .. } => None,
        }
    }

    pub fn argument(&self) -> Option<&Category> {
        match self {
            Category::Functor { argument, .. } => Some(argument),
            Category::Atom { .. } => None,
        }
    }

    pub fn direction(&self) -> Option<Direction> {
        match self {
            Category::Functor { direction, .. } => Some(*direction),
            Category::Atom { .. } => None,
        }
    }

    /// The `k`-th argument, counting from the innermost (`k = 1`) outwards.
    pub fn argument_slot(&self, k: usize) -> Option<&Category> {
        let arity = self.arity();
        if k == 0 || k > arity {
            return None;
        }
        // Peel `arity - k` outer arguments, then take the next one.
        let mut cur = self;
        for _ in 0..arity - k {
            cur = cur.result()?;
        }
        cur.argument()
    }

    pub fn without_feature(&self) -> Category {
        match self {
            Category::Atom { name, .. } => Category::atom(name),
            Category::Functor {
                result,
                direction,
                argument,
            } => Category::functor(result.without_feature(), *direction, argument.without_feature()),
        }
    }

    /// `X/X` or `X\X`, ignoring features.
    pub fn is_modifier(&self) -> bool {
        match self {
            Category::Functor { result, argument, .. } => result.without_feature() == argument.without_feature(),
            Category::Atom { .. } => false,
        }
    }

    /// `NP/N`, ignoring features.
    pub fn is_determiner(&self) -> bool {
        match self {
            Category::Functor {
                result,
                direction: Direction::Forward,
                argument,
            } => result.is_atom_named("NP") && argument.is_atom_named("N"),
            _ => false,
        }
    }

    pub fn is_atom_named(&self, wanted: &str) -> bool {
        matches!(self, Category::Atom { name, .. } if name == wanted)
    }

    pub fn is_punctuation(&self) -> bool {
        matches!(self, Category::Atom { name, feature: None } if PUNCTUATION.contains(&name.as_str()))
    }

    pub fn is_conjunction(&self) -> bool {
        self.is_atom_named("conj")
            || matches!(self, Category::Atom { name, feature: None } if name == "," || name == ";")
    }

    /// `X` marked as the right conjunct of a coordination, only defined for
    /// featureless atoms.
    pub fn conjunct(&self) -> Option<Category> {
        match self {
            Category::Atom { name, feature: None } => Some(Category::atom_with_feature(name, "conj")),
            _ => None,
        }
    }
}

/// Function application. Returns `None` when the categories do not combine.
pub fn apply(functor: &Category, arg: &Category, direction: Direction) -> Option<Category> {
    match functor {
        Category::Functor {
            result,
            direction: d,
            argument,
        } if *d == direction && **argument == *arg => Some((**result).clone()),
        _ => None,
    }
}

/// Harmonic composition: `X/Y Y/Z => X/Z` forwards, `Y\Z X\Y => X\Z`
/// backwards. `primary` is the functor whose argument is consumed.
pub fn compose(primary: &Category, secondary: &Category, direction: Direction) -> Option<Category> {
    let (
        Category::Functor {
            result: x,
            direction: d1,
            argument: y,
        },
        Category::Functor {
            result: y2,
            direction: d2,
            argument: z,
        },
    ) = (primary, secondary)
    else {
        return None;
    };
    if *d1 != direction || *d2 != direction || y != y2 {
        return None;
    }
    Some(Category::functor((**x).clone(), direction, (**z).clone()))
}

/// Which rule, if any, derives `parent` from `left` and `right`.
pub fn binary_rule(parent: &Category, left: &Category, right: &Category) -> Option<BinaryRule> {
    use BinaryRule::*;
    let candidates = [
        (ForwardApplication, apply(left, right, Direction::Forward)),
        (BackwardApplication, apply(right, left, Direction::Backward)),
        (ForwardComposition, compose(left, right, Direction::Forward)),
        (BackwardComposition, compose(right, left, Direction::Backward)),
    ];
    for (rule, derived) in candidates {
        if derived.as_ref() == Some(parent) {
            return Some(rule);
        }
    }
    if left.is_conjunction() && right.conjunct().as_ref() == Some(parent) {
        return Some(ConjunctMarking);
    }
    if left == parent && left.conjunct().as_ref() == Some(right) {
        return Some(Coordination);
    }
    if left.is_punctuation() && right == parent {
        return Some(LeftPunctuation);
    }
    if right.is_punctuation() && left == parent {
        return Some(RightPunctuation);
    }
    None
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(c: &Category, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if c.is_functor() {
                write!(f, "({})", c)
            } else {
                write!(f, "{}", c)
            }
        }
        match self {
            Category::Atom { name, feature } => {
                write!(f, "{}", name)?;
                if let Some(feat) = feature {
                    write!(f, "[{}]", feat)?;
                }
                Ok(())
            }
            Category::Functor {
                result,
                direction,
                argument,
            } => {
                operand(result, f)?;
                write!(f, "{}", direction.slash())?;
                operand(argument, f)
            }
        }
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Category::parse(s)
    }
}

fn is_atom_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, ',' | '.' | ';' | ':' | '_' | '-')
}

struct Parser<'a> {
    text: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            chars: text.char_indices().collect(),
            pos: 0,
        }
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.text.len(), |&(o, _)| o)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::CategoryParse {
            text: self.text.to_string(),
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn parse(mut self) -> Result<Category> {
        if self.text.is_empty() {
            return Err(self.err("empty category"));
        }
        let cat = self.expr()?;
        match self.peek() {
            None => Ok(cat),
            Some(')') => Err(self.err("unbalanced ')'")),
            Some(c) => Err(self.err(format!("unexpected character {:?}", c))),
        }
    }

    fn expr(&mut self) -> Result<Category> {
        let mut cat = self.operand()?;
        loop {
            let direction = match self.peek() {
                Some('/') => Direction::Forward,
                Some('\\') => Direction::Backward,
                _ => return Ok(cat),
            };
            self.pos += 1;
            let arg = self.operand()?;
            cat = Category::functor(cat, direction, arg);
        }
    }

    fn operand(&mut self) -> Result<Category> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if is_atom_char(c) => self.atom(),
            Some(c) => Err(self.err(format!("expected category, found {:?}", c))),
            None => Err(self.err("empty operand")),
        }
    }

    fn atom(&mut self) -> Result<Category> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if is_atom_char(c)) {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        let mut feature = None;
        if self.peek() == Some('[') {
            self.pos += 1;
            let fstart = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
                self.pos += 1;
            }
            if self.pos == fstart {
                return Err(self.err("empty feature"));
            }
            let feat: String = self.chars[fstart..self.pos].iter().map(|&(_, c)| c).collect();
            if self.peek() != Some(']') {
                return Err(self.err("expected ']'"));
            }
            self.pos += 1;
            feature = Some(feat);
        }
        Ok(Category::Atom { name, feature })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(s: &str) -> Category {
        Category::parse(s).unwrap()
    }

    #[test]
    fn parses_transitive_verb() {
        let expected = Category::forward(
            Category::backward(Category::atom("S"), Category::atom("NP")),
            Category::atom("NP"),
        );
        assert_eq!(c("(S\\NP)/NP"), expected);
        assert_eq!(c("S\\NP/NP"), expected);
        assert_eq!(expected.to_string(), "(S\\NP)/NP");
    }

    #[test]
    fn parses_atom_and_features() {
        assert_eq!(c("NP"), Category::atom("NP"));
        assert_eq!(c("S[dcl]"), Category::atom_with_feature("S", "dcl"));
        assert_eq!(c("S[dcl]\\NP").to_string(), "S[dcl]\\NP");
        assert_ne!(c("S[dcl]"), c("S"));
    }

    #[test]
    fn parses_vp_modifier_preposition() {
        let cat = c("((S\\NP)\\(S\\NP))/PP");
        assert_eq!(cat.argument(), Some(&Category::atom("PP")));
        assert_eq!(cat.result(), Some(&c("(S\\NP)\\(S\\NP)")));
        assert_eq!(cat.to_string(), "((S\\NP)\\(S\\NP))/PP");
    }

    #[test]
    fn rejects_malformed() {
        for (text, offset) in [
            ("", 0),
            ("(S\\NP", 5),
            ("S\\NP)", 4),
            ("S/", 2),
            ("S//NP", 2),
            ("S NP", 1),
            ("S[]", 2),
            ("()", 1),
        ] {
            match Category::parse(text) {
                Err(Error::CategoryParse { offset: o, .. }) => assert_eq!(o, offset, "{:?}", text),
                other => panic!("{:?} parsed as {:?}", text, other),
            }
        }
    }

    #[test]
    fn application() {
        assert_eq!(apply(&c("(S\\NP)/NP"), &c("NP"), Direction::Forward), Some(c("S\\NP")));
        assert_eq!(apply(&c("NP"), &c("NP"), Direction::Forward), None);
        assert_eq!(apply(&c("S\\NP"), &c("NP"), Direction::Backward), Some(c("S")));
        assert_eq!(apply(&c("S\\NP"), &c("NP"), Direction::Forward), None);
        assert_eq!(apply(&c("S[dcl]\\NP"), &c("NP[nb]"), Direction::Backward), None);
    }

    #[test]
    fn composition() {
        assert_eq!(
            compose(&c("S/(S\\NP)"), &c("(S\\NP)/NP"), Direction::Forward),
            Some(c("S/NP"))
        );
        assert_eq!(compose(&c("NP"), &c("NP"), Direction::Forward), None);
        assert_eq!(compose(&c("(S\\NP)\\(S\\NP)"), &c("PP/NP"), Direction::Backward), None);
        assert_eq!(compose(&c("S\\S"), &c("S\\NP"), Direction::Backward), Some(c("S\\NP")));
    }

    #[test]
    fn argument_slots_count_from_innermost() {
        let tv = c("(S\\NP)/NP");
        assert_eq!(tv.arity(), 2);
        assert_eq!(tv.argument_slot(1), Some(&Category::atom("NP")));
        assert_eq!(tv.argument_slot(2), Some(&Category::atom("NP")));
        let dtv = c("((S\\NP)/PP)/NP");
        assert_eq!(dtv.argument_slot(1), Some(&c("NP")));
        assert_eq!(dtv.argument_slot(2), Some(&c("PP")));
        assert_eq!(dtv.argument_slot(3), Some(&c("NP")));
        assert_eq!(c("NP").argument_slot(1), None);
        assert_eq!(tv.argument_slot(0), None);
        assert_eq!(tv.argument_slot(3), None);
        let according = c("((S\\NP)\\(S\\NP))/PP");
        assert_eq!(according.arity(), 3);
        assert_eq!(according.argument_slot(according.arity()), Some(&c("PP")));
    }

    #[test]
    fn binary_rules() {
        assert_eq!(
            binary_rule(&c("S\\NP"), &c("(S\\NP)/NP"), &c("NP")),
            Some(BinaryRule::ForwardApplication)
        );
        assert_eq!(
            binary_rule(&c("S"), &c("NP"), &c("S\\NP")),
            Some(BinaryRule::BackwardApplication)
        );
        assert_eq!(
            binary_rule(&c("NP[conj]"), &c(","), &c("NP")),
            Some(BinaryRule::ConjunctMarking)
        );
        assert_eq!(
            binary_rule(&c("NP"), &c("NP"), &c("NP[conj]")),
            Some(BinaryRule::Coordination)
        );
        assert_eq!(
            binary_rule(&c("S"), &c("S"), &c(".")),
            Some(BinaryRule::RightPunctuation)
        );
        assert_eq!(binary_rule(&c("S"), &c("NP"), &c("NP")), None);
    }

    pub(crate) fn arb_category() -> impl Strategy<Value = Category> {
        let leaf = prop_oneof![
            Just(Category::atom("S")),
            Just(Category::atom("NP")),
            Just(Category::atom("N")),
            Just(Category::atom("PP")),
            Just(Category::atom_with_feature("S", "dcl")),
            Just(Category::atom(",")),
        ];
        leaf.prop_recursive(6, 64, 2, |inner| {
            (
                inner.clone(),
                prop_oneof![Just(Direction::Forward), Just(Direction::Backward)],
                inner,
            )
                .prop_map(|(r, d, a)| Category::functor(r, d, a))
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(cat in arb_category()) {
            let text = cat.to_string();
            let back = Category::parse(&text).unwrap();
            prop_assert_eq!(&back, &cat);
            prop_assert_eq!(back.to_string(), text);
        }

        #[test]
        fn arity_counts_slashes(cat in arb_category()) {
            let spine_slashes = {
                let mut n = 0;
                let mut cur = &cat;
                while let Some(r) = cur.result() { n += 1; cur = r; }
                n
            };
            prop_assert_eq!(cat.arity(), spine_slashes);
        }

        #[test]
        fn apply_iff_matching_functor(f in arb_category(), a in arb_category(), fwd in any::<bool>()) {
            let d = if fwd { Direction::Forward } else { Direction::Backward };
            let out = apply(&f, &a, d);
            let matches = f.direction() == Some(d) && f.argument() == Some(&a);
            prop_assert_eq!(out.is_some(), matches);
            if let Some(r) = out {
                prop_assert_eq!(r.arity() + 1, f.arity());
            }
        }

        #[test]
        fn composition_agrees_with_application_chain(x in arb_category(), y in arb_category(), z in arb_category()) {
            let xy = Category::forward(x.clone(), y.clone());
            let yz = Category::forward(y.clone(), z.clone());
            let xz = compose(&xy, &yz, Direction::Forward).unwrap();
            prop_assert_eq!(&xz, &Category::forward(x.clone(), z.clone()));
            let y_again = apply(&yz, &z, Direction::Forward).unwrap();
            prop_assert_eq!(apply(&xy, &y_again, Direction::Forward), Some(x.clone()));
            prop_assert_eq!(apply(&xz, &z, Direction::Forward), Some(x));
        }
    }
}
