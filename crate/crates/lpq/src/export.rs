use crate::candidate::UpdateRecord;
use crate::SearchError;
use lp_core::LPParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
struct DeltaDoc {
    layers: Vec<DeltaLayer>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DeltaLayer {
    layer: usize,
    n: u8,
    es: u8,
    rs: u8,
    sf: f64,
}

/// Best-candidate document: per-layer records {layer, n, es, rs, sf}.
pub fn delta_to_json_string(delta: &[LPParams]) -> String {
    let doc = DeltaDoc {
        layers: delta
            .iter()
            .enumerate()
            .map(|(layer, p)| DeltaLayer {
                layer,
                n: p.n,
                es: p.es,
                rs: p.rs,
                sf: p.sf,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("delta serializes")
}

pub fn delta_from_json_str(text: &str) -> Result<Vec<LPParams>, SearchError> {
    let doc: DeltaDoc =
        serde_json::from_str(text).map_err(|e| SearchError::MalformedDelta(e.to_string()))?;
    let mut layers = doc.layers;
    layers.sort_by_key(|l| l.layer);
    for (i, l) in layers.iter().enumerate() {
        if l.layer != i {
            return Err(SearchError::MalformedDelta(format!(
                "layer indices not contiguous at {i}"
            )));
        }
    }
    Ok(layers
        .into_iter()
        .map(|l| LPParams::new(l.n, l.es, l.rs, l.sf))
        .collect())
}

/// History CSV: update_index,best_fitness,l_co,l_cr.
pub fn history_to_csv(history: &[UpdateRecord]) -> String {
    let mut out = String::from("update_index,best_fitness,l_co,l_cr\n");
    for r in history {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.index, r.best_fitness, r.divergence, r.compression
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_round_trip() {
        let delta = vec![
            LPParams::new(8, 1, 3, 0.125),
            LPParams::new(4, 0, 2, -2.5),
        ];
        let text = delta_to_json_string(&delta);
        let back = delta_from_json_str(&text).unwrap();
        assert_eq!(back, delta);
    }

    #[test]
    fn bad_delta_is_rejected() {
        assert!(delta_from_json_str("{}").is_err() || delta_from_json_str("{}").unwrap().is_empty());
        assert!(delta_from_json_str("not json").is_err());
        let gap = r#"{"layers":[{"layer":1,"n":8,"es":1,"rs":3,"sf":0}]}"#;
        assert!(delta_from_json_str(gap).is_err());
    }

    #[test]
    fn history_csv_shape() {
        let rows = vec![UpdateRecord {
            index: 0,
            best_fitness: 1.5,
            divergence: 0.5,
            compression: 352.0,
        }];
        let csv = history_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("update_index,best_fitness,l_co,l_cr"));
        assert_eq!(lines.next(), Some("0,1.5,0.5,352"));
    }
}
