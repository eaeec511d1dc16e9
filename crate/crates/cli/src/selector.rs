use std::fmt;
use std::str::FromStr;

use crosscal::complex_vcp::CVcpKind;
use crosscal::VcpKind;

/// A structure named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    Real(VcpKind),
    Complex(CVcpKind),
}

impl FromStr for Selector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().to_ascii_lowercase();
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s.as_str(), None),
        };
        let param = || -> Result<usize, String> {
            tail.ok_or_else(|| format!("selector {s:?} needs a parameter, e.g. {head}:2"))?
                .parse::<usize>()
                .map_err(|_| format!("bad parameter in selector {s:?}"))
        };
        let sel = match (head, tail) {
            ("g2", None) => Selector::Real(VcpKind::G2),
            ("spin7", None) => Selector::Real(VcpKind::Spin7),
            ("complex", _) => Selector::Real(VcpKind::Complex(param()?)),
            ("volume", _) => Selector::Real(VcpKind::Volume(param()?)),
            ("cy", _) => Selector::Complex(CVcpKind::CalabiYau(param()?)),
            ("hk", _) => Selector::Complex(CVcpKind::Hyperkahler(param()?)),
            _ => {
                return Err(format!(
                    "unknown structure {s:?}; expected complex:m, volume:n, g2, spin7, cy:n or hk:m"
                ))
            }
        };
        Ok(sel)
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::Real(VcpKind::G2) => write!(f, "g2"),
            Selector::Real(VcpKind::Spin7) => write!(f, "spin7"),
            Selector::Real(VcpKind::Complex(m)) => write!(f, "complex:{m}"),
            Selector::Real(VcpKind::Volume(n)) => write!(f, "volume:{n}"),
            Selector::Complex(CVcpKind::CalabiYau(n)) => write!(f, "cy:{n}"),
            Selector::Complex(CVcpKind::Hyperkahler(m)) => write!(f, "hk:{m}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        for s in ["g2", "spin7", "complex:2", "volume:5", "cy:3", "hk:1"] {
            assert_eq!(s.parse::<Selector>().unwrap().to_string(), s);
        }
        for bad in ["g3", "cy", "volume:x", "g2:1", ""] {
            assert!(bad.parse::<Selector>().is_err(), "{bad}");
        }
    }
}
