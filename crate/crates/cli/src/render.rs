use polywedge::TorsionCertificate;

/// Left-aligned columns separated by two spaces.
pub struct Table {
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { rows: vec![header.iter().map(|h| h.to_string()).collect()] }
    }

    pub fn row<const N: usize>(&mut self, cells: [String; N]) {
        self.rows.push(cells.into());
    }

    pub fn render(&self) -> String {
        let cols = self.rows[0].len();
        let widths: Vec<usize> =
            (0..cols).map(|c| self.rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for r in &self.rows {
            let line: Vec<String> = r.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn certificate(c: &TorsionCertificate) -> String {
    let mut out = format!("prime {}  kind {:?}\n", c.prime, c.kind);
    if let Some(src) = &c.source {
        out.push_str(&format!("A1  source trace {:?}  order {:?}\n", src.trace, src.order));
    } else if let Some(seq) = &c.sequence {
        out.push_str(&format!("A1  trace {:?}  order {:?}\n", seq.trace, seq.order));
    }
    if let Some(a2) = &c.a2 {
        if a2.solvable {
            out.push_str(&format!(
                "A2  {}: {} = {}  denominator gcds {:?}\n",
                verdict(a2.pass),
                a2.target,
                a2.coeffs.iter().zip(&a2.combo).map(|(x, f)| format!("({x}) {f}")).collect::<Vec<_>>().join(" + "),
                a2.denominator_gcds
            ));
        } else {
            out.push_str(&format!("A2  FAIL: {} is not a rational combination of {}\n", a2.target, a2.combo.join(",")));
        }
    }
    if let Some(a3) = &c.a3 {
        let ds: Vec<String> = a3
            .d_values
            .iter()
            .map(|d| match (d.d, d.gcd) {
                (Some(x), Some(g)) => format!("d{}={x} (gcd {g})", d.step + 1),
                _ => format!("d{}=undefined", d.step + 1),
            })
            .collect();
        out.push_str(&format!("A3  {}: {}\n", verdict(a3.pass), if ds.is_empty() { "no blowdown steps".into() } else { ds.join(", ") }));
    }
    if let Some(w) = &c.wedge {
        out.push_str(&format!("wedge at {}  a = {}  gcd(|1-a|, p) = {}\n", w.facet, w.a, w.gcd));
    }
    if let (Some(seq), true) = (&c.sequence, c.source.is_some()) {
        out.push_str(&format!("induced trace {:?}\n", seq.trace));
    }
    out.push_str(&format!(
        "conclusion {:?}{}  (attempts {})\n",
        c.conclusion,
        c.failed_at.map(|s| format!(" at {s:?}")).unwrap_or_default(),
        c.attempts
    ));
    out
}
