//! Static SVG rendering of scalograms: a raster heatmap embedded as
//! base64 PNG, axes, the cone of influence, and an optional annotation
//! lane underneath the time axis.

use base64::Engine;
use image::{ImageBuffer, Rgb};

use havok_core::physio::{AnnotationTrack, MinuteLabel};
use havok_core::Scalogram;

use crate::error::{CliError, CliResult};
use crate::io::downsample_indices;

const STAGE: &str = "svg";

/// Perceptually ordered dark-to-bright ramp (a compact viridis-like
/// table, linearly interpolated).
const RAMP: [[u8; 3]; 9] = [
    [68, 1, 84],
    [71, 44, 122],
    [59, 81, 139],
    [44, 113, 142],
    [33, 144, 141],
    [39, 173, 129],
    [92, 200, 99],
    [170, 220, 50],
    [253, 231, 37],
];

fn colorize(t: f64) -> Rgb<u8> {
    let t = t.clamp(0.0, 1.0) * (RAMP.len() - 1) as f64;
    let i = (t as usize).min(RAMP.len() - 2);
    let frac = t - i as f64;
    let mix = |a: u8, b: u8| (a as f64 + frac * (b as f64 - a as f64)).round() as u8;
    Rgb([
        mix(RAMP[i][0], RAMP[i + 1][0]),
        mix(RAMP[i][1], RAMP[i + 1][1]),
        mix(RAMP[i][2], RAMP[i + 1][2]),
    ])
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the scalogram to an SVG document.
///
/// The modulus matrix is downsampled in time, rasterized with a
/// sequential colormap (rows keep the scalogram's descending-frequency
/// order, so low frequencies sit at the bottom), and embedded as PNG.
/// The cone of influence is drawn as a dashed white curve. When minute
/// annotations are given, a label lane is drawn under the time axis.
pub fn scalogram_svg(
    sg: &Scalogram,
    annotations: Option<&AnnotationTrack>,
    title: &str,
) -> CliResult<String> {
    let n_scales = sg.modulus.len();
    if n_scales == 0 {
        return Err(CliError::input(STAGE, "empty scalogram"));
    }
    let idx = downsample_indices(sg.times.len(), 2048);
    let width = idx.len() as u32;
    let height = n_scales as u32;

    let peak = sg
        .modulus
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, &v| m.max(v));
    let scale = if peak > 0.0 { 1.0 / peak } else { 0.0 };

    let mut img = ImageBuffer::new(width, height);
    for (row, moduli) in sg.modulus.iter().enumerate() {
        for (px, &col) in idx.iter().enumerate() {
            img.put_pixel(px as u32, row as u32, colorize(moduli[col] * scale));
        }
    }
    let mut png = Vec::new();
    img.write_to(&mut std::io::Cursor::new(&mut png), image::ImageFormat::Png)
        .map_err(|e| CliError::input(STAGE, format!("png encode: {e}")))?;
    let png64 = base64::engine::general_purpose::STANDARD.encode(&png);

    // layout
    let plot_w = 900.0f64;
    let plot_h = 360.0f64;
    let margin_left = 70.0;
    let margin_top = 40.0;
    let lane_h = if annotations.is_some() { 18.0 } else { 0.0 };
    let total_w = margin_left + plot_w + 30.0;
    let total_h = margin_top + plot_h + 50.0 + lane_h;

    let t_min = sg.times[idx[0]];
    let t_max = sg.times[*idx.last().unwrap()];
    let t_span = (t_max - t_min).max(1e-12);
    let x_of = |t: f64| margin_left + (t - t_min) / t_span * plot_w;
    // log-frequency vertical axis, high frequencies on top
    let f_hi = sg.freqs[0];
    let f_lo = *sg.freqs.last().unwrap();
    let log_span = (f_hi / f_lo).ln().max(1e-12);
    let y_of = |f: f64| margin_top + (f_hi / f).ln() / log_span * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total_w:.0}\" height=\"{total_h:.0}\" \
         viewBox=\"0 0 {total_w:.0} {total_h:.0}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"22\" font-size=\"15\">{}</text>\n",
        margin_left,
        escape(title)
    ));
    svg.push_str(&format!(
        "<image x=\"{margin_left}\" y=\"{margin_top}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         preserveAspectRatio=\"none\" href=\"data:image/png;base64,{png64}\"/>\n"
    ));

    // cone of influence over the downsampled time axis
    let mut coi_path = String::from("M");
    for (k, &col) in idx.iter().enumerate() {
        let f = sg.coi[col].clamp(f_lo, f_hi);
        let x = x_of(sg.times[col]);
        let y = y_of(f);
        if k == 0 {
            coi_path.push_str(&format!("{x:.1},{y:.1}"));
        } else {
            coi_path.push_str(&format!(" L{x:.1},{y:.1}"));
        }
    }
    svg.push_str(&format!(
        "<path d=\"{coi_path}\" fill=\"none\" stroke=\"white\" stroke-dasharray=\"6 4\" \
         stroke-width=\"1.5\" opacity=\"0.9\"/>\n"
    ));

    // frequency ticks: powers of ten inside the range
    let mut decade = 10f64.powf(f_lo.log10().floor());
    while decade <= f_hi {
        if decade >= f_lo {
            let y = y_of(decade);
            svg.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#333\"/>\n",
                margin_left - 6.0,
                margin_left
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{decade:e}</text>\n",
                margin_left - 9.0,
                y + 4.0
            ));
        }
        decade *= 10.0;
    }
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" transform=\"rotate(-90 16 {:.1})\" text-anchor=\"middle\">Frequency (Hz)</text>\n",
        margin_top + plot_h / 2.0,
        margin_top + plot_h / 2.0
    ));

    // time ticks
    for k in 0..=6 {
        let t = t_min + t_span * k as f64 / 6.0;
        let x = x_of(t);
        let y = margin_top + plot_h;
        svg.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{y:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#333\"/>\n",
            y + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{:.0}</text>\n",
            y + 18.0,
            t
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">Time (s)</text>\n",
        margin_left + plot_w / 2.0,
        margin_top + plot_h + 34.0
    ));

    // annotation lane: apnea minutes red, normal green
    if let Some(ann) = annotations {
        let lane_y = margin_top + plot_h + 38.0;
        for (m, label) in ann.minute_labels.iter().enumerate() {
            let a = ann.t0 + m as f64 * 60.0;
            let b = a + 60.0;
            if b < t_min || a > t_max {
                continue;
            }
            let x0 = x_of(a.max(t_min));
            let x1 = x_of(b.min(t_max));
            let color = match label {
                MinuteLabel::Apnea => "#d62728",
                MinuteLabel::Normal => "#2ca02c",
            };
            svg.push_str(&format!(
                "<rect x=\"{x0:.1}\" y=\"{lane_y:.1}\" width=\"{:.1}\" height=\"12\" fill=\"{color}\"/>\n",
                (x1 - x0).max(0.5)
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">labels</text>\n",
            margin_left - 9.0,
            lane_y + 10.0
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use havok_core::{cwt_morse, TimeSeries};

    #[test]
    fn produces_wellformed_svg_with_annotation_lane() {
        let values: Vec<f64> = (0..512)
            .map(|k| (2.0 * std::f64::consts::PI * 0.05 * k as f64).sin())
            .collect();
        let ts = TimeSeries::new(values, 1.0, 0.0, "t").unwrap();
        let sg = cwt_morse(&ts, 3.0, 60.0, 6).unwrap();
        let ann = AnnotationTrack {
            minute_labels: vec![
                MinuteLabel::Normal,
                MinuteLabel::Apnea,
                MinuteLabel::Normal,
                MinuteLabel::Apnea,
            ],
            t0: 0.0,
        };
        let svg = scalogram_svg(&sg, Some(&ann), "test scalogram").unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("data:image/png;base64,"));
        assert!(svg.contains("#d62728")); // apnea lane drawn
        assert_eq!(svg.matches("<svg").count(), 1);
    }

    #[test]
    fn colormap_endpoints() {
        assert_eq!(colorize(0.0), Rgb([68, 1, 84]));
        assert_eq!(colorize(1.0), Rgb([253, 231, 37]));
    }
}
