use thiserror::Error;

use crate::syntax::{Assertion, Expr, Sort, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("cannot substitute a {found} expression for `{var}` of sort {expected}")]
    SortMismatch {
        var: String,
        expected: Sort,
        found: Sort,
    },
}

/// `a[e/v]`: replaces every free occurrence of `v` in `a` by `e`. Bound
/// variables that would capture a variable of `e` are renamed first.
pub fn substitute(a: &Assertion, v: &Var, e: &Expr) -> Result<Assertion, SubstError> {
    if e.sort() != v.sort {
        return Err(SubstError::SortMismatch {
            var: v.name.clone(),
            expected: v.sort,
            found: e.sort(),
        });
    }
    Ok(subst(a, &v.name, e))
}

fn subst(a: &Assertion, v: &str, e: &Expr) -> Assertion {
    match a {
        Assertion::True | Assertion::False => a.clone(),
        Assertion::Atom(x) => Assertion::atom(x.replace(v, e)),
        Assertion::And(l, r) => Assertion::and(subst(l, v, e), subst(r, v, e)),
        Assertion::Or(l, r) => Assertion::or(subst(l, v, e), subst(r, v, e)),
        Assertion::Implies(l, r) => Assertion::implies(subst(l, v, e), subst(r, v, e)),
        Assertion::Not(x) => Assertion::not(subst(x, v, e)),
        Assertion::Bounded {
            quantifier,
            var,
            bound,
            body,
        } => {
            let bound = bound.replace(v, e);
            if var == v {
                // `v` is shadowed in the body.
                return Assertion::Bounded {
                    quantifier: *quantifier,
                    var: var.clone(),
                    bound,
                    body: body.clone(),
                };
            }
            let (var, body) = if e.mentions(var) {
                let fresh = fresh_name(var, body, e);
                let renamed = subst(body, var, &Expr::var(fresh.clone(), Sort::Int));
                (fresh, renamed)
            } else {
                (var.clone(), (**body).clone())
            };
            Assertion::Bounded {
                quantifier: *quantifier,
                var,
                bound,
                body: Box::new(subst(&body, v, e)),
            }
        }
    }
}

fn fresh_name(base: &str, body: &Assertion, e: &Expr) -> String {
    let taken = body.free_vars();
    let binders = body.binders();
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|n| !taken.contains(n) && !binders.contains(n) && !e.mentions(n))
        .expect("unbounded supply of names")
}
