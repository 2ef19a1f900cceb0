//! Supported dimensions and `--dim` parsing.

use anyhow::{bail, Context, Result};

/// Primes with single-particle support.
pub const SINGLE_PRIMES: &[u32] = &[3, 5, 7, 11, 13];
/// Primes with two-particle (entangled basis, operator counting, two-partite tomography) support.
pub const TWO_PARTICLE_PRIMES: &[u32] = &[3, 5, 7];
/// Prime powers `(p, n)`; single-particle field-trace construction only.
pub const PRIME_POWERS: &[(u32, u32)] = &[(3, 2), (5, 2), (3, 3), (7, 2)];

pub const MAX_DIM_ENV: &str = "PUEB_MAX_DIM";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dim {
    pub p: u32,
    pub n: u32,
    pub d: u32,
}

impl Dim {
    pub fn is_prime(&self) -> bool {
        self.n == 1
    }

    pub fn two_particle(&self) -> bool {
        self.is_prime() && TWO_PARTICLE_PRIMES.contains(&self.p)
    }
}

fn supported_list() -> String {
    let mut v: Vec<String> = SINGLE_PRIMES.iter().map(|p| p.to_string()).collect();
    v.extend(PRIME_POWERS.iter().map(|(p, n)| format!("{p}^{n}")));
    v.join(", ")
}

/// Parses `"p"` or `"p^n"`. A bare prime power such as `"9"` is read as `"3^2"`.
/// `cap` is an optional upper bound on the dimension.
pub fn parse_dim_with_cap(spec: &str, cap: Option<u32>) -> Result<Dim> {
    let spec = spec.trim();
    let (p, n) = match spec.split_once('^') {
        Some((p, n)) => (
            p.trim().parse::<u32>().with_context(|| format!("bad dimension {spec:?}"))?,
            n.trim().parse::<u32>().with_context(|| format!("bad dimension {spec:?}"))?,
        ),
        None => {
            let d: u32 = spec.parse().with_context(|| format!("bad dimension {spec:?}"))?;
            PRIME_POWERS.iter().find(|&&(p, n)| p.pow(n) == d).copied().unwrap_or((d, 1))
        }
    };
    let supported = if n == 1 { SINGLE_PRIMES.contains(&p) } else { PRIME_POWERS.contains(&(p, n)) };
    if !supported {
        bail!("unsupported dimension {spec:?}; supported: {}", supported_list());
    }
    let d = p.pow(n);
    if let Some(cap) = cap {
        if d > cap {
            bail!("dimension {d} exceeds {MAX_DIM_ENV}={cap}");
        }
    }
    Ok(Dim { p, n, d })
}

/// Like [`parse_dim_with_cap`], with the cap read from `PUEB_MAX_DIM`.
pub fn parse_dim(spec: &str) -> Result<Dim> {
    let cap = match std::env::var(MAX_DIM_ENV) {
        Ok(v) => Some(v.trim().parse::<u32>().with_context(|| format!("{MAX_DIM_ENV}={v:?} is not an integer"))?),
        Err(_) => None,
    };
    parse_dim_with_cap(spec, cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_supported() {
        assert_eq!(parse_dim_with_cap("3", None).unwrap(), Dim { p: 3, n: 1, d: 3 });
        assert_eq!(parse_dim_with_cap("3^2", None).unwrap(), Dim { p: 3, n: 2, d: 9 });
        assert_eq!(parse_dim_with_cap("27", None).unwrap(), Dim { p: 3, n: 3, d: 27 });
        assert_eq!(parse_dim_with_cap("7^1", None).unwrap().d, 7);
        assert!(parse_dim_with_cap("13", None).unwrap().is_prime());
        assert!(!parse_dim_with_cap("11", None).unwrap().two_particle());
    }

    #[test]
    fn rejects_unsupported() {
        for s in ["4", "2", "17", "3^4", "x", "", "3^", "15"] {
            assert!(parse_dim_with_cap(s, None).is_err(), "{s}");
        }
    }

    #[test]
    fn cap_applies() {
        assert!(parse_dim_with_cap("5^2", Some(10)).is_err());
        assert!(parse_dim_with_cap("7", Some(10)).is_ok());
    }
}
