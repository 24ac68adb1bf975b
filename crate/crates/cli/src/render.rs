//! Plain-text views of documents for `--format human`.

use std::fmt::Write;

use cusp_core::document::Document;
use cusp_core::morphism::{PointTuple, StandardFormHom};

fn tuple(t: &PointTuple) -> String {
    let l: Vec<String> = t.lambdas.iter().map(|q| q.to_string()).collect();
    format!("nu {:?}, omega {:?}, points [{}]", t.nu, t.omega, l.join(", "))
}

fn hom(out: &mut String, h: &StandardFormHom) {
    let _ = writeln!(out, "hom {} -> {}{}", h.source(), h.target(), if h.is_unital() { " (unital)" } else { "" });
    let _ = writeln!(out, "  interior: nu {:?}, omega {:?}, mu {}", h.nu(), h.omega(), h.mu());
    for (k, l) in h.lambdas().iter().enumerate() {
        let _ = writeln!(out, "  lambda_{}: {l}", k + 1);
    }
    for (k, t) in h.boundary() {
        let _ = writeln!(out, "  at {k}: {}", tuple(t));
    }
}

pub fn document(d: &Document) -> String {
    let mut out = String::new();
    match d {
        Document::Shape(s) => {
            let _ = writeln!(out, "shape {s}");
        }
        Document::Rankfn(f) => {
            let _ = writeln!(out, "{f}");
        }
        Document::Element(e) => {
            let _ = writeln!(out, "{e}");
        }
        Document::Hom(h) => hom(&mut out, h),
        Document::Table(t) => {
            let _ = writeln!(out, "table on F_{} of {} -> {}", t.depth(), t.source(), t.target());
            for (k, v) in t.values() {
                let _ = writeln!(out, "  {k:<8} {v}");
            }
        }
        Document::Tower(t) => {
            for i in 0..t.stage_count() {
                let shapes: Vec<String> = t.stage(i).iter().map(|s| s.to_string()).collect();
                let _ = writeln!(out, "stage {i}: {}", shapes.join(" ⊕ "));
                if let Some(layer) = t.parts().connects.get(i) {
                    for c in layer {
                        let _ = writeln!(out, "  {} -> {} (corner {})", c.from, c.to, c.corner);
                    }
                }
            }
        }
        Document::AlphaFamily(f) => {
            let _ = writeln!(out, "table family on {}", f.source);
            for s in &f.tables {
                let _ = writeln!(out, "  depth {} into stage {}", s.table.depth(), s.stage);
            }
        }
        Document::Lift(l) => {
            hom(&mut out, &l.hom);
            let c = &l.certificate;
            let _ = writeln!(
                out,
                "certificate: close to the depth-{} table on F_{} (checked: {})",
                c.table_depth, c.entourage_depth, c.checked
            );
        }
        Document::Certificate(c) => {
            let _ = writeln!(out, "intertwining certificate to depth {} for {}", c.depth, c.source);
            for r in &c.levels {
                let gap = match &r.distance {
                    Some(d) => match &d.max_gap {
                        Some(g) if d.tuples_equal => format!("gap {g}"),
                        _ => "patterns differ".to_string(),
                    },
                    None => "-".to_string(),
                };
                let chain = r.chain.as_ref().map_or("-".to_string(), |c| format!("{} at F_{}", c.holds, c.depth));
                let _ = writeln!(
                    out,
                    "  level {}: stage {}, entourage {}, chain {}, {}, within bound {}",
                    r.n, r.stage, r.entourage, chain, gap, r.within_bound
                );
            }
        }
        Document::Decomposition(d) => {
            let _ = writeln!(out, "decomposition over {}", d.shape);
            for (k, u) in d.levels.iter().enumerate() {
                let _ = writeln!(out, "  level {}: {u}", k + 1);
            }
        }
    }
    out
}
