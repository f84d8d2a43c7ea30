//! Field serialization: a lattice header followed by `(j, re, im)` triples
//! for every nonzero coefficient. Both encodings round-trip bit-exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::FourierField;
use super::lattice::{BoxShape, LatticeSpec};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"PNLFLD01";

#[derive(Serialize, Deserialize)]
struct FieldDoc {
    spec: LatticeSpec,
    extent: usize,
    entries: Vec<(Vec<i64>, f64, f64)>,
}

fn rebuild(spec: LatticeSpec, extent: usize, entries: Vec<(Vec<i64>, f64, f64)>) -> Result<FourierField> {
    let spec = LatticeSpec::new(spec.dim, spec.k_max, spec.pad_factor)?;
    let shape = BoxShape::new(spec.dim, extent);
    let mut coeffs = vec![Complex64::default(); shape.len()];
    for (j, re, im) in entries {
        if j.len() != spec.dim {
            return Err(Error::Format(format!("index {j:?} has wrong dimension")));
        }
        let idx = shape
            .index_of(&j)
            .ok_or_else(|| Error::Format(format!("index {j:?} outside extent {extent}")))?;
        coeffs[idx] = Complex64::new(re, im);
    }
    Ok(FourierField::from_coeffs(spec, extent, coeffs))
}

pub fn to_json(u: &FourierField) -> Result<String> {
    let doc = FieldDoc {
        spec: *u.spec(),
        extent: u.extent(),
        entries: u.nonzero().map(|(j, c)| (j, c.re, c.im)).collect(),
    };
    Ok(serde_json::to_string(&doc)?)
}

pub fn from_json(text: &str) -> Result<FourierField> {
    let doc: FieldDoc = serde_json::from_str(text)?;
    rebuild(doc.spec, doc.extent, doc.entries)
}

pub fn to_bytes(u: &FourierField) -> Vec<u8> {
    let spec = u.spec();
    let entries: Vec<_> = u.nonzero().collect();
    let mut out = Vec::with_capacity(48 + entries.len() * (8 * spec.dim + 16));
    out.extend_from_slice(MAGIC);
    for v in [spec.dim, spec.k_max, spec.pad_factor, u.extent(), entries.len()] {
        out.extend_from_slice(&(v as u64).to_le_bytes());
    }
    for (j, c) in entries {
        for x in j {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out.extend_from_slice(&c.re.to_bits().to_le_bytes());
        out.extend_from_slice(&c.im.to_bits().to_le_bytes());
    }
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<FourierField> {
    let mut cursor = bytes;
    let mut take8 = || -> Result<[u8; 8]> {
        if cursor.len() < 8 {
            return Err(Error::Format("truncated field record".into()));
        }
        let (head, rest) = cursor.split_at(8);
        cursor = rest;
        Ok(head.try_into().unwrap())
    };
    if &take8()? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut header = [0usize; 5];
    for h in header.iter_mut() {
        *h = u64::from_le_bytes(take8()?) as usize;
    }
    let [dim, k_max, pad, extent, count] = header;
    if dim == 0 || dim > 8 {
        return Err(Error::Format(format!("implausible dimension {dim}")));
    }
    let mut entries = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let mut j = Vec::with_capacity(dim);
        for _ in 0..dim {
            j.push(i64::from_le_bytes(take8()?));
        }
        let re = f64::from_bits(u64::from_le_bytes(take8()?));
        let im = f64::from_bits(u64::from_le_bytes(take8()?));
        entries.push((j, re, im));
    }
    rebuild(
        LatticeSpec {
            dim,
            k_max,
            pad_factor: pad,
        },
        extent,
        entries,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn exact_roundtrip(vals in prop::collection::vec((any::<f64>(), -1e300f64..1e300), 1..40),
                           dim in 1usize..3, k in 1usize..4) {
            let spec = LatticeSpec::new(dim, k, 2).unwrap();
            let mut it = vals.iter().cycle();
            let u = FourierField::from_fn(spec, |_| {
                let (a, b) = *it.next().unwrap();
                Complex64::new(if a.is_finite() { a } else { 0.5 }, b)
            });
            let back = from_json(&to_json(&u).unwrap()).unwrap();
            prop_assert_eq!(&back, &u);
            let back = from_bytes(&to_bytes(&u)).unwrap();
            prop_assert_eq!(&back, &u);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(from_bytes(b"nope").is_err());
        assert!(from_json("{\"spec\":1}").is_err());
    }
}
