//! Minimal SVG chart writers for the trend reports: polyline line charts
//! and scatter plots with plain axes. No layout engine, no styling hooks;
//! output is byte-stable for equal inputs.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#16a085", "#7f8c8d", "#2c3e50",
];

struct Scale {
    min_x: f64,
    max_x: f64,
    min_y: f64,
    max_y: f64,
}

impl Scale {
    fn of(points: impl Iterator<Item = (f64, f64)>) -> Scale {
        let mut scale = Scale {
            min_x: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            min_y: 0.0,
            max_y: f64::NEG_INFINITY,
        };
        for (x, y) in points {
            scale.min_x = scale.min_x.min(x);
            scale.max_x = scale.max_x.max(x);
            scale.max_y = scale.max_y.max(y);
        }
        if !scale.min_x.is_finite() {
            scale.min_x = 0.0;
            scale.max_x = 1.0;
        }
        if scale.max_x <= scale.min_x {
            scale.max_x = scale.min_x + 1.0;
        }
        if scale.max_y <= scale.min_y {
            scale.max_y = scale.min_y + 1.0;
        }
        scale
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.min_x) / (self.max_x - self.min_x) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.min_y) / (self.max_y - self.min_y) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
        WIDTH / 2.0,
        xml_escape(title)
    )
}

fn axes(scale: &Scale) -> String {
    format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <text x=\"{m}\" y=\"{lb}\" font-family=\"sans-serif\" font-size=\"10\">{min_x}</text>\n\
         <text x=\"{r}\" y=\"{lb}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{max_x}</text>\n\
         <text x=\"{ly}\" y=\"{t}\" font-family=\"sans-serif\" font-size=\"10\">{max_y}</text>\n",
        m = MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        lb = HEIGHT - MARGIN + 15.0,
        ly = 5.0,
        min_x = scale.min_x,
        max_x = scale.max_x,
        max_y = scale.max_y,
    )
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Line chart over named series of (x, y) points.
pub fn line_chart(title: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let scale = Scale::of(series.iter().flat_map(|(_, pts)| pts.iter().copied()));
    let mut out = header(title);
    out.push_str(&axes(&scale));
    for (i, (name, points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{:.1},{:.1}", scale.x(*x), scale.y(*y)))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{}</text>\n",
            WIDTH - MARGIN + 5.0,
            MARGIN + 14.0 * i as f64,
            xml_escape(name)
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Scatter plot over named rows: each row is drawn at its own y level, one
/// dot per x value. Fits the per-rule migration-time layout.
pub fn scatter_chart(title: &str, rows: &[(String, Vec<f64>)]) -> String {
    let scale = Scale::of(
        rows.iter()
            .enumerate()
            .flat_map(|(i, (_, xs))| xs.iter().map(move |x| (*x, i as f64 + 1.0))),
    );
    let mut out = header(title);
    out.push_str(&axes(&scale));
    for (i, (name, xs)) in rows.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = scale.y(i as f64 + 1.0);
        for x in xs {
            out.push_str(&format!(
                "<circle cx=\"{:.1}\" cy=\"{y:.1}\" r=\"3\" fill=\"{color}\"/>\n",
                scale.x(*x)
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{y:.1}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{}</text>\n",
            5.0,
            xml_escape(name)
        ));
    }
    out.push_str("</svg>\n");
    out
}
