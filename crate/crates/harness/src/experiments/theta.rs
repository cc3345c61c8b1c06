//! Colored crossing indicators over a `(p, q)` grid sharing one set of marks
//! per replicate.
//!
//! Columns: `p`, `q`; `grains`, `active`, `special`, `green`, `crossing`,
//! `plain_crossing` (crossing of the active grains, ignoring greens). The
//! `special_parse` key selects how the special list counts neighbours.

use std::collections::BTreeMap;

use hardcore_core::graph::build_contact_graph;
use hardcore_core::percolation::{color_with_marks, open_crossing, plain_crossing, theta_replicate, Color};

use super::{timed, Point};
use crate::config::ExperimentConfig;
use crate::output::{Assertion, Layout, Row, Value};

pub const LAYOUT: Layout = Layout {
    params: &["p", "q"],
    metrics: &["grains", "active", "special", "green", "crossing", "plain_crossing"],
};

pub fn run(config: &ExperimentConfig, seed: u64) -> Vec<Point> {
    let n = config.ball_radius;
    let drawn = theta_replicate(n, config.dimension, config.intensity, config.radius_law(), seed, 0)
        .map(|(c, marks)| {
            let g = build_contact_graph(&c);
            (c, marks, g)
        });
    let mut out = Vec::new();
    for &p in &config.p_values {
        for &q in &config.q_values {
            out.push(timed(vec![Value::from(p), Value::from(q)], || {
                let (c, marks, g) = drawn.as_ref().map_err(Clone::clone)?;
                let colored = color_with_marks(c, g, marks, p, q, config.special_parse)?;
                let count = |col: Color| colored.color.iter().filter(|&&x| x == col).count();
                Ok(vec![
                    c.len().into(),
                    (c.len() - count(Color::Red)).into(),
                    colored.special.iter().filter(|&&s| s).count().into(),
                    count(Color::Green).into(),
                    open_crossing(c, g, &colored.uncolored(), n).into(),
                    plain_crossing(c, g, marks, p, n).into(),
                ])
            }));
        }
    }
    out
}

/// Ordered pairs of rows of one replicate along which the crossing
/// indicator decreases while `p` (for `axis = 0`) or `q` grows.
fn violations(layout: &Layout, rows: &[Row], axis: usize) -> Vec<(usize, String)> {
    let mut by_rep: BTreeMap<usize, Vec<&Row>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.ok()) {
        by_rep.entry(r.replicate).or_default().push(r);
    }
    let other = 1 - axis;
    let mut out = Vec::new();
    for (rep, rs) in by_rep {
        for a in &rs {
            for b in &rs {
                let (pa, pb) = (a.params[axis].as_f64(), b.params[axis].as_f64());
                if a.params[other] == b.params[other]
                    && pa < pb
                    && a.metric(layout, "crossing") > b.metric(layout, "crossing")
                {
                    out.push((rep, format!("{} -> {}", a.param_key(), b.param_key())));
                }
            }
        }
    }
    out
}

fn monotone(name: &str, v: &[(usize, String)]) -> Assertion {
    let shown: Vec<String> = v.iter().take(10).map(|(r, s)| format!("replicate {r}: {s}")).collect();
    Assertion::new(name, v.is_empty(), format!("{} violations {}", v.len(), shown.join("; ")))
}

pub fn assess(_config: &ExperimentConfig, layout: &Layout, rows: &[Row]) -> Vec<Assertion> {
    let plain_mismatch = rows
        .iter()
        .filter(|r| r.params[1].as_f64() == Some(1.0))
        .filter(|r| r.metric(layout, "crossing") != r.metric(layout, "plain_crossing"))
        .count();
    vec![
        monotone("crossing_monotone_in_p", &violations(layout, rows, 0)),
        monotone("crossing_monotone_in_q", &violations(layout, rows, 1)),
        Assertion::new(
            "q_one_matches_plain_model",
            plain_mismatch == 0,
            format!("{plain_mismatch} rows at q = 1 differ from the plain model"),
        ),
    ]
}
