use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{prime_power, FiniteField};

use super::matrix::{MatrixKind, MatrixRep};
use super::ops::direct_product;
use super::{FiniteGroup, Structure};

/// Parsed form of the textual group grammar:
/// `cyclic:<m>`, `sym:<n>`, `dihedral:<2n>`, `gl:<n>:<q>`, `sl:<n>:<q>`,
/// `torus:<r>:<q>` and `product:<spec>,<spec>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    Cyclic(u32),
    Sym(u32),
    /// Dihedral group of the given (even) order.
    Dihedral(u32),
    Gl(u32, u32),
    Sl(u32, u32),
    Torus(u32, u32),
    Product(Box<GroupSpec>, Box<GroupSpec>),
}

fn parse_num(spec: &str, s: &str) -> Result<u32> {
    s.parse::<u32>().map_err(|_| Error::Parse {
        spec: spec.to_string(),
        reason: format!("`{s}` is not a non-negative integer"),
    })
}

fn prime_power_arg(spec: &str, q: u32) -> Result<u32> {
    prime_power(q).map(|_| q).ok_or_else(|| Error::Parse {
        spec: spec.to_string(),
        reason: format!("field order {q} is not a prime power"),
    })
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: &str| Error::Parse {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let s_trim = s.trim();
        let (head, rest) = s_trim.split_once(':').ok_or_else(|| fail("missing `:`"))?;
        match head {
            "product" => {
                for (i, _) in rest.match_indices(',') {
                    if let (Ok(a), Ok(b)) = (rest[..i].parse(), rest[i + 1..].parse()) {
                        return Ok(GroupSpec::Product(Box::new(a), Box::new(b)));
                    }
                }
                Err(fail("expected `product:<spec>,<spec>`"))
            }
            "cyclic" | "sym" | "dihedral" => {
                let v = parse_num(s, rest)?;
                match head {
                    "cyclic" if v >= 1 => Ok(GroupSpec::Cyclic(v)),
                    "sym" if (1..=8).contains(&v) => Ok(GroupSpec::Sym(v)),
                    "dihedral" if v >= 2 && v % 2 == 0 => Ok(GroupSpec::Dihedral(v)),
                    "cyclic" => Err(fail("cyclic order must be at least 1")),
                    "sym" => Err(fail("symmetric degree must lie in 1..=8")),
                    _ => Err(fail("dihedral order must be even and at least 2")),
                }
            }
            "gl" | "sl" | "torus" => {
                let (a, b) = rest.split_once(':').ok_or_else(|| fail("expected `<dim>:<q>`"))?;
                let dim = parse_num(s, a)?;
                let q = prime_power_arg(s, parse_num(s, b)?)?;
                if !(1..=6).contains(&dim) {
                    return Err(fail("matrix dimension must lie in 1..=6"));
                }
                Ok(match head {
                    "gl" => GroupSpec::Gl(dim, q),
                    "sl" => GroupSpec::Sl(dim, q),
                    _ => GroupSpec::Torus(dim, q),
                })
            }
            _ => Err(fail(&format!("unknown group family `{head}`"))),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(m) => write!(f, "cyclic:{m}"),
            GroupSpec::Sym(n) => write!(f, "sym:{n}"),
            GroupSpec::Dihedral(n) => write!(f, "dihedral:{n}"),
            GroupSpec::Gl(n, q) => write!(f, "gl:{n}:{q}"),
            GroupSpec::Sl(n, q) => write!(f, "sl:{n}:{q}"),
            GroupSpec::Torus(r, q) => write!(f, "torus:{r}:{q}"),
            GroupSpec::Product(a, b) => write!(f, "product:{a},{b}"),
        }
    }
}

impl GroupSpec {
    /// Order computed from the closed forms, before anything is built.
    pub fn expected_order(&self) -> u128 {
        match *self {
            GroupSpec::Cyclic(m) => m as u128,
            GroupSpec::Sym(n) => (1..=n as u128).product(),
            GroupSpec::Dihedral(n) => n as u128,
            GroupSpec::Gl(n, q) => {
                let q = q as u128;
                let qn = q.pow(n);
                (0..n).map(|i| qn - q.pow(i)).product()
            }
            GroupSpec::Sl(n, q) => GroupSpec::Gl(n, q).expected_order() / (q as u128 - 1),
            GroupSpec::Torus(r, q) => (q as u128 - 1).pow(r),
            GroupSpec::Product(ref a, ref b) => a.expected_order() * b.expected_order(),
        }
    }
}

/// Build the group described by `spec`, refusing orders above `order_cap`.
pub fn build_group(spec: &GroupSpec, order_cap: u64) -> Result<Arc<FiniteGroup>> {
    let order = spec.expected_order();
    if order > order_cap as u128 {
        return Err(Error::cap(format!("order of {spec}"), order, order_cap as u128));
    }
    let name = spec.to_string();
    let group = match spec {
        GroupSpec::Cyclic(m) => FiniteGroup::from_structure(name, *m as usize, Structure::Cyclic { m: *m }),
        GroupSpec::Dihedral(n) => {
            FiniteGroup::from_structure(name, *n as usize, Structure::Dihedral { n: n / 2 })
        }
        GroupSpec::Sym(n) => FiniteGroup::from_structure(
            name,
            order as usize,
            Structure::Perm { degree: *n as usize },
        ),
        GroupSpec::Gl(n, q) | GroupSpec::Sl(n, q) | GroupSpec::Torus(n, q) => {
            let kind = match spec {
                GroupSpec::Gl(..) => MatrixKind::General,
                GroupSpec::Sl(..) => MatrixKind::Special,
                _ => MatrixKind::Diagonal,
            };
            let field = Arc::new(FiniteField::new(*q)?);
            let rep = MatrixRep::enumerate(field, *n as usize, kind)?;
            if rep.len() as u128 != order {
                return Err(Error::Internal(format!(
                    "{spec}: enumerated {} matrices, closed form gives {order}",
                    rep.len()
                )));
            }
            FiniteGroup::from_structure(name, rep.len(), Structure::Matrix(rep))
        }
        GroupSpec::Product(a, b) => {
            let ga = build_group(a, order_cap)?;
            let gb = build_group(b, order_cap)?;
            return direct_product(&ga, &gb, order_cap);
        }
    };
    Ok(Arc::new(group))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    #[test]
    fn grammar_round_trip() {
        for s in [
            "cyclic:6",
            "sym:3",
            "dihedral:8",
            "gl:2:3",
            "sl:2:4",
            "torus:2:5",
            "product:cyclic:2,cyclic:3",
            "product:product:cyclic:2,cyclic:3,sym:3",
            "product:cyclic:2,product:cyclic:3,sym:3",
        ] {
            assert_eq!(parse(s).to_string(), s);
        }
    }

    #[test]
    fn grammar_rejects() {
        for s in [
            "", "cyclic", "cyclic:", "cyclic:0", "cyclic:x", "dihedral:7", "gl:2:6", "gl:2", "foo:3",
            "product:cyclic:2", "sym:9", "torus:0:3",
        ] {
            assert!(s.parse::<GroupSpec>().is_err(), "{s} should be rejected");
        }
    }

    #[test]
    fn closed_form_orders() {
        assert_eq!(parse("gl:2:3").expected_order(), 48);
        assert_eq!(parse("gl:2:4").expected_order(), 180);
        assert_eq!(parse("sl:2:2").expected_order(), 6);
        assert_eq!(parse("torus:2:4").expected_order(), 9);
        assert_eq!(parse("gl:3:2").expected_order(), 168);
    }

    #[test]
    fn cap_refuses() {
        let err = build_group(&parse("gl:3:5"), DEFAULT_ORDER_CAP).unwrap_err();
        assert!(err.is_refusal());
    }

    use crate::group::DEFAULT_ORDER_CAP;
}
