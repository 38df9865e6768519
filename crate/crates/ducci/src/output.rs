//! JSON, CSV and DOT renderings. JSON objects come out with sorted keys.

use std::collections::BTreeMap;
use std::fmt::Write;

use ducci_core::fixed_space::SpectrumAlgebraic;
use ducci_core::graph::TransitionGraph;
use ducci_core::{ClassCounts, ClassTag, GroupReport, MaxPeriodRecord, SpectrumReport};
use serde_json::{json, Map, Value};

/// Counts that overflow `u64` become decimal strings.
pub fn big(x: u128) -> Value {
    match u64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(x.to_string()),
    }
}

pub fn classes_json(c: &ClassCounts) -> Value {
    let mut map = Map::new();
    for tag in ClassTag::ALL {
        map.insert(tag.as_str().to_string(), big(c.get(tag)));
    }
    Value::Object(map)
}

fn histogram_json(h: &BTreeMap<u64, u64>) -> Value {
    Value::Object(h.iter().map(|(k, v)| (k.to_string(), Value::from(*v))).collect())
}

pub fn record_json(rec: &MaxPeriodRecord) -> Value {
    json!({ "n": rec.n, "m": rec.m, "L": rec.len, "P": rec.period })
}

pub fn report_json(r: &SpectrumReport) -> Value {
    let breakdown: Map<String, Value> =
        r.class_breakdown.iter().map(|(d, c)| (d.to_string(), classes_json(c))).collect();
    json!({
        "n": r.params.n(),
        "m": r.params.m(),
        "P": r.period,
        "L": r.len,
        "cycle_histogram": histogram_json(&r.cycle_histogram),
        "full_histogram": histogram_json(&r.full_histogram),
        "class_breakdown": breakdown,
    })
}

pub fn algebraic_json(a: &SpectrumAlgebraic) -> Value {
    let divisors: Vec<Value> = a
        .divisors
        .iter()
        .map(|e| {
            json!({
                "d": e.d,
                "dimension": e.dimension,
                "exact_count": big(e.exact_count),
                "classes": classes_json(&e.exact_classes),
                "fixed_classes": classes_json(&e.classes),
            })
        })
        .collect();
    json!({ "n": a.params.n(), "m": a.params.m(), "P": a.period, "divisors": divisors })
}

pub fn group_json(g: &GroupReport) -> Value {
    let generators: Vec<Value> = g.generators.iter().map(|p| json!(p.image())).collect();
    json!({
        "order": g.order,
        "generators": generators,
        "element_orders": histogram_json(&g.element_order_histogram),
        "is_abelian": g.is_abelian,
        "contains_n_cycle": g.contains_n_cycle,
        "name_hint": g.name_hint,
    })
}

pub const CSV_HEADER: &str = "period,count,zero,uniform,sum,other";

fn csv_row(out: &mut String, d: u64, count: u128, c: &ClassCounts) {
    writeln!(out, "{d},{count},{},{},{},{}", c.zero, c.uniform, c.sum, c.other).unwrap();
}

/// One row per period over all tuples.
pub fn report_csv(r: &SpectrumReport) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for (d, count) in &r.full_histogram {
        csv_row(&mut out, *d, *count as u128, &r.class_breakdown[d]);
    }
    out
}

/// One row per occurring period over cycle tuples.
pub fn algebraic_csv(a: &SpectrumAlgebraic) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for e in a.divisors.iter().filter(|e| e.exact_count > 0) {
        csv_row(&mut out, e.d, e.exact_count, &e.exact_classes);
    }
    out
}

/// Deterministic DOT: nodes in state order, cycle nodes double-circled,
/// one edge per node.
pub fn export_dot(g: &TransitionGraph) -> String {
    let mut order: Vec<usize> = (0..g.nodes.len()).collect();
    order.sort_by_key(|&i| g.nodes[i].state_index());
    let mut out = String::from("digraph ducci {\n");
    for &i in &order {
        let shape = if g.on_cycle[i] { "doublecircle" } else { "circle" };
        writeln!(out, "  \"{}\" [shape={shape}];", g.nodes[i]).unwrap();
    }
    let mut edges = g.edges.clone();
    edges.sort_by_key(|&(i, _)| g.nodes[i].state_index());
    for (i, j) in edges {
        writeln!(out, "  \"{}\" -> \"{}\";", g.nodes[i], g.nodes[j]).unwrap();
    }
    out.push_str("}\n");
    out
}
