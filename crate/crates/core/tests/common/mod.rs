//! A two-class fragment (`A` and `Pair`) and a generator of well-classed
//! terms over it, shared by the property suites.

#![allow(dead_code)]

use gradefj::hetero::{GradeUniverse, KindId, KindedGrade};
use gradefj::lang::{parse_program, ClassTable};

#[derive(Clone, Debug)]
pub enum Term {
    Var(String),
    NewA,
    NewPair(Box<Term>, Box<Term>),
    Field(Box<Term>, bool),
    Block {
        pair: bool,
        grade: usize,
        var: String,
        init: Box<Term>,
        body: Box<Term>,
    },
}

pub struct Fragment {
    pub u: GradeUniverse,
    /// Grades usable as block and field grades.
    pub kind: Vec<KindedGrade>,
    /// The search bound `G`.
    pub bound: Vec<KindedGrade>,
    pub first: KindedGrade,
    pub second: KindedGrade,
    pub table: ClassTable,
}

impl Fragment {
    pub fn new(kind: &str, first: usize, second: usize) -> Self {
        let u = GradeUniverse::default();
        let elems = u.kind_elements(&KindId::new(kind)).unwrap().unwrap();
        let mut bound = elems.clone();
        bound.extend((0..=3).map(KindedGrade::nat));
        let (first, second) = (elems[first].clone(), elems[second].clone());
        let src = format!("class A {{}} class Pair {{ A[{first}] first; A[{second}] second; }} run new A() at N:1");
        let table = parse_program(&src, &u).unwrap().table;
        Fragment {
            u,
            kind: elems,
            bound,
            first,
            second,
            table,
        }
    }

    pub fn show(&self, t: &Term) -> String {
        match t {
            Term::Var(x) => x.clone(),
            Term::NewA => "new A()".into(),
            Term::NewPair(a, b) => format!("new Pair({}, {})", self.show(a), self.show(b)),
            Term::Field(e, first) => format!("{}.{}", self.show(e), if *first { "first" } else { "second" }),
            Term::Block {
                pair,
                grade,
                var,
                init,
                body,
            } => format!(
                "{{{}[{}] {var} = {}; {}}}",
                if *pair { "Pair" } else { "A" },
                self.kind[*grade],
                self.show(init),
                self.show(body)
            ),
        }
    }
}

/// Builds a well-classed term from a byte tape.
pub struct Gen<'a> {
    pub tape: &'a [u8],
    pub pos: usize,
    pub fresh: usize,
    pub kinds: usize,
}

impl Gen<'_> {
    pub fn next(&mut self, n: usize) -> usize {
        let b = self.tape.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b as usize % n
    }

    pub fn term(&mut self, pair: bool, depth: usize, scope: &mut Vec<(String, bool)>) -> Term {
        let vars: Vec<String> = scope.iter().filter(|v| v.1 == pair).map(|v| v.0.clone()).collect();
        let choice = if depth == 0 { self.next(2) } else { self.next(4) };
        match (choice, pair) {
            (0, _) if !vars.is_empty() => Term::Var(vars[self.next(vars.len())].clone()),
            (0 | 1, false) => Term::NewA,
            (0 | 1, true) => {
                let d = depth.saturating_sub(1);
                Term::NewPair(Box::new(self.term(false, d, scope)), Box::new(self.term(false, d, scope)))
            }
            (2, false) => Term::Field(Box::new(self.term(true, depth - 1, scope)), self.next(2) == 0),
            (2, true) => {
                let d = depth - 1;
                Term::NewPair(Box::new(self.term(false, d, scope)), Box::new(self.term(false, d, scope)))
            }
            _ => {
                let bpair = self.next(2) == 0;
                let grade = self.next(self.kinds);
                let init = self.term(bpair, depth - 1, scope);
                self.fresh += 1;
                let var = format!("z{}", self.fresh);
                scope.push((var.clone(), bpair));
                let body = self.term(pair, depth - 1, scope);
                scope.pop();
                Term::Block {
                    pair: bpair,
                    grade,
                    var,
                    init: Box::new(init),
                    body: Box::new(body),
                }
            }
        }
    }
}
