//! Canonical JSON for certificates and families.
//!
//! Keys are emitted in sorted order (struct fields below are declared that
//! way), integers that can grow without bound are decimal strings, and the
//! output is compact, so equal certificates serialize to identical bytes.

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{FamilyMember, QuadraticPoly, SeedSolution, SolutionFamily};
use crate::liouville::Sign;
use crate::pell::PellSolution;
use crate::signchange::{CertificateMetadata, SignChangeCertificate, Witness};

mod decimal {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let s = String::deserialize(d)?;
        if s.is_empty()
            || s.starts_with('+')
            || (s.len() > 1 && s.trim_start_matches('-').starts_with('0'))
        {
            return Err(de::Error::custom(format!(
                "non-canonical integer string {s:?}"
            )));
        }
        s.parse().map_err(de::Error::custom)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateJson {
    #[serde(rename = "A0")]
    a0: u128,
    families: Vec<FamilyJson>,
    metadata: MetadataJson,
    poly: QuadraticPoly,
    witnesses: Vec<WitnessJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetadataJson {
    members_beyond: usize,
    n_limit: u64,
    scan_start: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessJson {
    #[serde(with = "decimal")]
    l: BigUint,
    lambda: Sign,
    #[serde(with = "decimal")]
    m: BigUint,
    n: u64,
    #[serde(with = "decimal")]
    value: BigUint,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyJson {
    fundamental: FundamentalJson,
    #[serde(with = "decimal")]
    l: BigUint,
    members: Vec<MemberJson>,
    #[serde(rename = "pellN", with = "decimal")]
    pell_n: BigUint,
    seed: SeedJson,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FundamentalJson {
    #[serde(with = "decimal")]
    r: BigUint,
    #[serde(with = "decimal")]
    s: BigUint,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberJson {
    #[serde(with = "decimal")]
    m: BigUint,
    #[serde(with = "decimal")]
    n: BigUint,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedJson {
    #[serde(with = "decimal")]
    m0: BigUint,
    // Small field: a JSON number.
    n0: i64,
    #[serde(with = "decimal")]
    t0: BigInt,
}

fn family_to_json(fam: &SolutionFamily) -> Result<FamilyJson> {
    let seed = fam.seed();
    let n0 = i64::try_from(seed.n0()).map_err(|_| {
        Error::Certificate(format!(
            "seed n0 = {} does not fit a JSON number",
            seed.n0()
        ))
    })?;
    Ok(FamilyJson {
        fundamental: FundamentalJson {
            r: fam.fundamental().x().clone(),
            s: fam.fundamental().y().clone(),
        },
        l: seed.l().clone(),
        members: fam
            .members()
            .iter()
            .map(|m| MemberJson {
                m: m.m.clone(),
                n: m.n.clone(),
            })
            .collect(),
        pell_n: fam.pell_modulus().clone(),
        seed: SeedJson {
            m0: seed.m0().clone(),
            n0,
            t0: seed.t0().clone(),
        },
    })
}

fn family_from_json(poly: QuadraticPoly, f: FamilyJson) -> SolutionFamily {
    SolutionFamily {
        seed: SeedSolution::from_parts_unchecked(
            poly,
            f.l,
            BigInt::from(f.seed.n0),
            f.seed.m0,
            f.seed.t0,
        ),
        fundamental: PellSolution::from_parts_unchecked(
            f.pell_n.clone(),
            f.fundamental.r,
            f.fundamental.s,
        ),
        pell_modulus: f.pell_n,
        members: f
            .members
            .into_iter()
            .map(|m| FamilyMember { n: m.n, m: m.m })
            .collect(),
    }
}

/// Canonical byte-stable JSON.
pub fn to_canonical_json(cert: &SignChangeCertificate) -> Result<String> {
    let json = CertificateJson {
        a0: cert.a0,
        families: cert
            .families
            .iter()
            .map(family_to_json)
            .collect::<Result<_>>()?,
        metadata: MetadataJson {
            members_beyond: cert.metadata.members_beyond,
            n_limit: cert.metadata.n_limit,
            scan_start: cert.metadata.scan_start,
        },
        poly: cert.poly,
        witnesses: cert
            .witnesses
            .iter()
            .map(|w| WitnessJson {
                l: w.l.clone(),
                lambda: w.lambda,
                m: w.m.clone(),
                n: w.n,
                value: w.value.clone(),
            })
            .collect(),
    };
    serde_json::to_string(&json).map_err(|e| Error::Certificate(e.to_string()))
}

/// Parses a certificate. Only the structure is checked here; use
/// [`verify_certificate`](crate::signchange::verify_certificate) for the
/// mathematics.
pub fn from_json(text: &str) -> Result<SignChangeCertificate> {
    let json: CertificateJson =
        serde_json::from_str(text).map_err(|e| Error::Certificate(e.to_string()))?;
    let poly = json.poly;
    let witnesses: [Witness; 2] = json
        .witnesses
        .into_iter()
        .map(|w| Witness {
            n: w.n,
            value: w.value,
            l: w.l,
            m: w.m,
            lambda: w.lambda,
        })
        .collect::<Vec<_>>()
        .try_into()
        .map_err(|v: Vec<_>| {
            Error::Certificate(format!("expected 2 witnesses, found {}", v.len()))
        })?;
    let families: [SolutionFamily; 2] = json
        .families
        .into_iter()
        .map(|f| family_from_json(poly, f))
        .collect::<Vec<_>>()
        .try_into()
        .map_err(|v: Vec<_>| {
            Error::Certificate(format!("expected 2 families, found {}", v.len()))
        })?;
    Ok(SignChangeCertificate {
        poly,
        a0: json.a0,
        witnesses,
        families,
        metadata: CertificateMetadata {
            n_limit: json.metadata.n_limit,
            scan_start: json.metadata.scan_start,
            members_beyond: json.metadata.members_beyond,
        },
    })
}

/// A family on its own, in the same shape it takes inside a certificate.
pub fn family_to_canonical_json(fam: &SolutionFamily) -> Result<String> {
    serde_json::to_string(&family_to_json(fam)?).map_err(|e| Error::Certificate(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signchange::{scan_certificate, verify_certificate, ScanOutcome};

    fn cert(a: i64, b: i64, c: i64) -> SignChangeCertificate {
        match scan_certificate(&QuadraticPoly::new(a, b, c).unwrap(), 100).unwrap() {
            ScanOutcome::Certificate(c) => *c,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        for (a, b, c) in [(1, 0, 1), (1, 1, 0), (2, 3, 1), (5, -17, 11)] {
            let original = cert(a, b, c);
            let text = to_canonical_json(&original).unwrap();
            let back = from_json(&text).unwrap();
            assert_eq!(back, original);
            assert_eq!(to_canonical_json(&back).unwrap(), text);
        }
    }

    #[test]
    fn keys_are_sorted() {
        let text = to_canonical_json(&cert(1, 0, 1)).unwrap();
        // serde_json::Value maps are BTreeMaps, so re-serializing sorts keys.
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&value).unwrap(), text);
        assert!(text.starts_with(r#"{"A0":2,"families":[{"fundamental":{"r":"#));
    }

    #[test]
    fn rejects_malformed() {
        let text = to_canonical_json(&cert(1, 0, 1)).unwrap();
        assert!(from_json(&text.replace(r#""A0":2"#, r#""A0":2,"extra":1"#)).is_err());
        assert!(from_json(&text.replace(r#""l":"5""#, r#""l":5"#)).is_err());
        assert!(from_json(&text.replace(r#""l":"5""#, r#""l":"05""#)).is_err());
        assert!(from_json(&text.replace(r#""lambda":-1"#, r#""lambda":0"#)).is_err());
        assert!(from_json("{}").is_err());
    }

    #[test]
    fn parsed_corruption_is_caught_by_verification() {
        let text = to_canonical_json(&cert(1, 0, 1)).unwrap();
        let tampered = text.replacen(r#""m":"1""#, r#""m":"2""#, 1);
        assert_ne!(tampered, text);
        let parsed = from_json(&tampered).unwrap();
        assert!(!verify_certificate(&parsed).is_valid());
    }
}
