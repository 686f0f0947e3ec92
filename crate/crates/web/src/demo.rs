//! JSON-returning operations behind the browser bindings.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use fivezero_core::code::{validate_parameters, Code, MessageTuple};
use fivezero_core::field::{ExtensionField, FieldElement, FieldOptions};
use fivezero_core::quadform::{
    gram_matrix, lemma21_predict, polynomial_basis, rank_and_disc, residue_profile, FormParams,
};
use fivezero_core::wdist;

/// Fields larger than this are refused so the page stays responsive.
pub const MAX_FIELD_SIZE: u64 = 3u64.pow(7);

fn field(p: u32, m: u32, k: u32) -> Result<ExtensionField, String> {
    validate_parameters(m, k).map_err(|e| e.to_string())?;
    if (p as u64).checked_pow(m).is_none_or(|q| q > MAX_FIELD_SIZE) {
        return Err(format!("p^m must be at most {MAX_FIELD_SIZE} in the browser"));
    }
    ExtensionField::with_options(
        p as u64,
        m,
        &FieldOptions {
            modulus: None,
            memory_cap: fivezero_core::field::DEFAULT_MEMORY_CAP,
        },
    )
    .map_err(|e| e.to_string())
}

/// Closed-form weight distribution. Only closed forms are evaluated, so any
/// odd prime and odd m >= 5 are accepted.
pub fn weight_table(p: u32, m: u32, k: u32) -> Result<String, String> {
    validate_parameters(m, k).map_err(|e| e.to_string())?;
    let wd = wdist::weight_table(p, m, k).map_err(|e| e.to_string())?;
    let rows: Vec<_> = wd
        .rows
        .iter()
        .map(|(w, f)| json!({"weight": w, "frequency": f.to_string()}))
        .collect();
    Ok(json!({
        "p": p,
        "m": m,
        "k": k,
        "length": (p as u64).pow(m) - 1,
        "dimension": 5 * m,
        "rows": rows,
        "min_distance": wdist::min_distance(&wd),
        "total": wd.total().to_string(),
    })
    .to_string())
}

fn element(f: &ExtensionField, log: i64) -> FieldElement {
    if log < 0 {
        FieldElement::ZERO
    } else {
        f.from_log(log)
    }
}

/// Rank, discriminant class, and counted versus predicted residue profile of
/// Q(x) = Tr(u x^2 + v x^(p^k+1) + w x^(p^2k+1)).
pub fn form_profile(p: u32, m: u32, k: u32, logs: [i64; 3]) -> Result<String, String> {
    let f = field(p, m, k)?;
    let [u, v, w] = logs.map(|l| element(&f, l));
    let q = FormParams::new(u, v, w, k);
    let gram = gram_matrix(&f, &q, &polynomial_basis(&f)).map_err(|e| e.to_string())?;
    let d = rank_and_disc(&gram, f.prime());
    let counted = residue_profile(&f, &q);
    let predicted = lemma21_predict(d.rank, d.disc_class, f.prime(), f.m()).map_err(|e| e.to_string())?;
    Ok(json!({
        "rank": d.rank,
        "disc": d.disc_class,
        "counted": counted.counts(),
        "predicted": predicted.counts(),
        "agree": counted == predicted,
    })
    .to_string())
}

/// A seeded random codeword with its weight found both ways.
pub fn codeword(p: u32, m: u32, k: u32, seed: u64) -> Result<String, String> {
    let f = field(p, m, k)?;
    let code = Code::from_field(f, k).map_err(|e| e.to_string())?;
    let t = MessageTuple::random(&code.field, &mut ChaCha8Rng::seed_from_u64(seed));
    let cw = code.codeword(&t);
    let via_sum = code.weight_via_charsum(&t).map_err(|e| e.to_string())?;
    let logs: Vec<Option<u32>> = t.to_array().iter().map(|x| x.log()).collect();
    Ok(json!({
        "tuple_logs": logs,
        "symbols": cw.0,
        "weight_counted": cw.weight(),
        "weight_from_sum": via_sum,
    })
    .to_string())
}
