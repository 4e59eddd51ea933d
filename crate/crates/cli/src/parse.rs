//! Compact command-line forms for families and strategies.
//!
//! `stable_pow:alpha=1` and `relativistic:alpha=1,m=0.5` expand to the JSON
//! objects used in configuration files; a literal JSON object is accepted too.

use coupling_lab::subordinators::StrategyName;
use coupling_lab::Family;
use serde_json::{Map, Number, Value};

fn expand(text: &str, tag: &str) -> Result<Value, String> {
    let text = text.trim();
    if text.starts_with('{') {
        return serde_json::from_str(text).map_err(|e| e.to_string());
    }
    let (name, params) = match text.split_once(':') {
        Some((n, p)) => (n, p),
        None => (text, ""),
    };
    let mut obj = Map::new();
    obj.insert(tag.to_string(), Value::String(name.trim().to_string()));
    for kv in params.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("expected key=value, got `{kv}`"))?;
        let v: f64 = v.trim().parse().map_err(|_| format!("`{}` is not a number", v.trim()))?;
        let num = Number::from_f64(v).ok_or_else(|| format!("{k} must be finite"))?;
        obj.insert(k.trim().to_string(), Value::Number(num));
    }
    Ok(Value::Object(obj))
}

pub fn family(text: &str) -> Result<Family, String> {
    serde_json::from_value(expand(text, "family")?).map_err(|e| format!("bad spec `{text}`: {e}"))
}

pub fn strategy(text: &str) -> Result<StrategyName, String> {
    serde_json::from_value(expand(text, "strategy")?).map_err(|e| format!("bad strategy `{text}`: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_and_json_forms() {
        assert_eq!(family("stable_pow:alpha=1").unwrap(), Family::StablePow { alpha: 1.0 });
        assert_eq!(
            family("relativistic: alpha=1, m=0.5").unwrap(),
            Family::Relativistic { alpha: 1.0, m: 0.5 }
        );
        assert_eq!(family(r#"{"family":"linear","b":2}"#).unwrap(), Family::Linear { b: 2.0 });
        assert_eq!(strategy("auto").unwrap(), StrategyName::Auto);
        assert_eq!(
            strategy("compound_poisson_approx:epsilon=1e-3").unwrap(),
            StrategyName::CompoundPoissonApprox { epsilon: 1e-3 }
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(family("stable_pow:alpha").is_err());
        assert!(family("stable_pow:alpha=x").is_err());
        assert!(family("stable_pow:alpha=1,gamma=2").is_err());
        assert!(family("nope:alpha=1").is_err());
        assert!(strategy("exact_stable:epsilon=1").is_err());
    }
}
