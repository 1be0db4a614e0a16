use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::analyze::Report;
use super::svg::{Plot, Series, Style};
use crate::growth::ModelKind;
use crate::regress::DatasetRow;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Text,
    Svg,
}

impl FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "text" => Ok(ReportFormat::Text),
            "svg" => Ok(ReportFormat::Svg),
            _ => Err(format!("unknown report format `{s}` (expected csv, text or svg)")),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_files(r: &Report) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();

    let mut s = String::from("key,domain,generator,filter,depth,batch_size,seed,epochs,final_size,a,b,log_r2,degenerate");
    for w in &r.options.windows {
        write!(s, ",winner_w{w}").unwrap();
    }
    s.push('\n');
    for t in &r.trajectories {
        let c = &t.config;
        write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            t.key, c.domain, c.generator, c.filter, c.depth, c.batch_size, c.seed, c.epochs, t.final_size, t.a, t.b,
            opt(t.log_r2), t.degenerate
        )
        .unwrap();
        for w in &r.options.windows {
            let winner = t.windows.iter().find(|f| f.window == *w).map(|f| f.winner.as_str()).unwrap_or("");
            write!(s, ",{winner}").unwrap();
        }
        s.push('\n');
    }
    out.push(("trajectories.csv", s));

    let mut s = String::from("domain,n,mean_b,max_b,count_b_gt_1,frac_b_lt_0_1,mean_b_any,mean_b_novelty,novelty_effect\n");
    for d in &r.domains {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            d.domain, d.n, d.mean_b, d.max_b, d.count_b_gt_1, d.frac_b_lt_0_1, d.mean_b_any, d.mean_b_novelty, d.novelty_effect
        )
        .unwrap();
    }
    out.push(("table1.csv", s));

    let mut s = String::from("window,domain,model,count\n");
    for w in &r.window_counts {
        writeln!(s, "{},{},{},{}", w.window, w.domain, w.model, w.count).unwrap();
    }
    out.push(("table2.csv", s));

    let mut s = String::from("key,window,model,aic\n");
    for t in &r.trajectories {
        for f in &t.windows {
            for (m, a) in &f.aic {
                writeln!(s, "{},{},{},{}", t.key, f.window, m, a).unwrap();
            }
        }
    }
    out.push(("window_aic.csv", s));

    let mut s = String::from("domain,lo,hi,count\n");
    for h in &r.histogram {
        writeln!(s, "{},{},{},{}", h.domain, h.lo, h.hi, h.count).unwrap();
    }
    out.push(("histogram.csv", s));

    let mut s = String::from("key,model,split,rmse,mape\n");
    for o in &r.oos {
        writeln!(s, "{},{},{},{},{}", o.key, o.model, o.split, o.rmse, o.mape).unwrap();
    }
    out.push(("oos.csv", s));

    let mut s = String::from("key,t,n,fitted\n");
    for t in &r.trajectories {
        for (i, n) in t.sizes.iter().enumerate() {
            let time = (i + 1) as f64;
            writeln!(s, "{},{},{},{}", t.key, i + 1, n, t.a * time.powf(t.b)).unwrap();
        }
    }
    out.push(("loglog.csv", s));

    let mut s = String::from("domain,generator,filter,depth,batch_size,seed,b,degenerate\n");
    let mut buf = Vec::new();
    if !r.dataset.is_empty() {
        DatasetRow::write_csv(&r.dataset, &mut buf).expect("in-memory write");
        let text = String::from_utf8(buf).expect("utf-8");
        s = text;
    }
    out.push(("dataset.csv", s));

    let reg = &r.regression;
    let mut s = String::from("eval,group,r2_mean,r2_std,mae_mean,r2,mae,mean_pred,mean_actual,n\n");
    let mut pairs = String::from("eval,actual,predicted\n");
    for (group, cv) in &reg.within {
        writeln!(s, "within,{group},{},{},{},,,,,{}", cv.r2_mean, cv.r2_std, cv.mae_mean, cv.pairs.len()).unwrap();
        for (a, p) in &cv.pairs {
            writeln!(pairs, "within:{group},{a},{p}").unwrap();
        }
    }
    if let Some(t) = &reg.transfer {
        writeln!(s, "transfer,arith+bool->list,,,,{},{},{},{},{}", t.r2, t.mae, t.mean_pred, t.mean_actual, t.n_test).unwrap();
        for (a, p) in &t.pairs {
            writeln!(pairs, "transfer,{a},{p}").unwrap();
        }
    }
    if let Some(cv) = &reg.pooled {
        writeln!(s, "pooled,all,{},{},{},,,,,{}", cv.r2_mean, cv.r2_std, cv.mae_mean, cv.pairs.len()).unwrap();
        for (a, p) in &cv.pairs {
            writeln!(pairs, "pooled,{a},{p}").unwrap();
        }
    }
    out.push(("regression.csv", s));
    out.push(("predicted_vs_actual.csv", pairs));

    let mut s = String::from("entry\n");
    for e in &r.errors {
        writeln!(s, "\"{}\"", e.replace('"', "\"\"")).unwrap();
    }
    out.push(("errors.csv", s));
    out
}

fn text(r: &Report) -> String {
    let mut s = String::new();
    writeln!(s, "Exponent b by substrate ({} trajectories, {} failed configs)", r.trajectories.len(), r.errors.len()).unwrap();
    writeln!(s, "{:<8}{:>6}{:>10}{:>10}{:>8}{:>10}{:>12}", "domain", "n", "mean b", "max b", "b>1", "b<0.1", "novelty-any").unwrap();
    for d in &r.domains {
        writeln!(
            s,
            "{:<8}{:>6}{:>10.3}{:>10.3}{:>8}{:>9.1}%{:>12.3}",
            d.domain.as_str(),
            d.n,
            d.mean_b,
            d.max_b,
            d.count_b_gt_1,
            100.0 * d.frac_b_lt_0_1,
            d.novelty_effect
        )
        .unwrap();
    }
    if !r.window_counts.is_empty() {
        writeln!(s, "\nAIC winners by window").unwrap();
        write!(s, "{:<8}{:<8}", "window", "domain").unwrap();
        for m in &r.options.models {
            write!(s, "{:>15}", m.as_str()).unwrap();
        }
        s.push('\n');
        let mut keys: Vec<(usize, String)> =
            r.window_counts.iter().map(|w| (w.window, w.domain.as_str().to_string())).collect();
        keys.dedup();
        for (w, d) in keys {
            write!(s, "{:<8}{:<8}", format!("<={w}"), d).unwrap();
            for m in &r.options.models {
                let c = r
                    .window_counts
                    .iter()
                    .find(|x| x.window == w && x.domain.as_str() == d && x.model == *m)
                    .map_or(0, |x| x.count);
                write!(s, "{c:>15}").unwrap();
            }
            s.push('\n');
        }
    }
    if !r.oos.is_empty() {
        writeln!(s, "\nOut-of-sample forecasts").unwrap();
        writeln!(s, "{:<16}{:>14}{:>14}{:>8}", "model", "mean RMSE", "mean MAPE", "wins").unwrap();
        let mut keys: Vec<&str> = r.oos.iter().map(|o| o.key.as_str()).collect();
        keys.dedup();
        let winners: Vec<ModelKind> = keys
            .iter()
            .filter_map(|k| {
                r.oos.iter().filter(|o| o.key == *k).min_by(|a, b| a.rmse.total_cmp(&b.rmse)).map(|o| o.model)
            })
            .collect();
        for m in &r.options.models {
            let rows: Vec<_> = r.oos.iter().filter(|o| o.model == *m).collect();
            let n = rows.len() as f64;
            writeln!(
                s,
                "{:<16}{:>14.4}{:>14.4}{:>8}",
                m.as_str(),
                rows.iter().map(|o| o.rmse).sum::<f64>() / n,
                rows.iter().map(|o| o.mape).sum::<f64>() / n,
                winners.iter().filter(|w| *w == m).count()
            )
            .unwrap();
        }
    }
    let reg = &r.regression;
    if !reg.within.is_empty() || reg.transfer.is_some() || reg.pooled.is_some() {
        writeln!(s, "\nArchitecture regression ({} features)", reg.features.len()).unwrap();
        for (g, cv) in &reg.within {
            writeln!(s, "within {g:<12} R2 = {:.3} ± {:.3}  MAE = {:.3}", cv.r2_mean, cv.r2_std, cv.mae_mean).unwrap();
        }
        if let Some(t) = &reg.transfer {
            writeln!(
                s,
                "transfer arith+bool -> list  R2 = {:.3}  MAE = {:.3}  mean pred {:.3} vs actual {:.3}",
                t.r2, t.mae, t.mean_pred, t.mean_actual
            )
            .unwrap();
        }
        if let Some(cv) = &reg.pooled {
            writeln!(s, "pooled with domain   R2 = {:.3} ± {:.3}  MAE = {:.3}", cv.r2_mean, cv.r2_std, cv.mae_mean).unwrap();
        }
    }
    s
}

fn svgs(r: &Report) -> Vec<(&'static str, String)> {
    let mut hist = Plot { title: "Exponent b by substrate".into(), x_label: "b".into(), y_label: "configs".into(), ..Default::default() };
    let mut loglog =
        Plot { title: "Mean rule count".into(), x_label: "epoch".into(), y_label: "|S|".into(), log_x: true, log_y: true, ..Default::default() };
    for d in &r.domains {
        hist.series.push(Series {
            name: d.domain.to_string(),
            points: r.histogram.iter().filter(|h| h.domain == d.domain).map(|h| ((h.lo + h.hi) / 2.0, h.count as f64)).collect(),
            style: Style::Line,
        });
        let rows: Vec<_> = r.trajectories.iter().filter(|t| t.config.domain == d.domain).collect();
        let len = rows.iter().map(|t| t.sizes.len()).max().unwrap_or(0);
        let points = (0..len)
            .filter_map(|i| {
                let vals: Vec<f64> = rows.iter().filter_map(|t| t.sizes.get(i).map(|&n| n as f64)).collect();
                (!vals.is_empty()).then(|| ((i + 1) as f64, vals.iter().sum::<f64>() / vals.len() as f64))
            })
            .collect();
        loglog.series.push(Series { name: d.domain.to_string(), points, style: Style::Line });
    }
    let mut pva = Plot { title: "Predicted vs actual b".into(), x_label: "actual".into(), y_label: "predicted".into(), ..Default::default() };
    for (g, cv) in &r.regression.within {
        pva.series.push(Series { name: format!("within {g}"), points: cv.pairs.clone(), style: Style::Points });
    }
    if let Some(t) = &r.regression.transfer {
        pva.series.push(Series { name: "transfer".into(), points: t.pairs.clone(), style: Style::Points });
    }
    if let Some(cv) = &r.regression.pooled {
        pva.series.push(Series { name: "pooled".into(), points: cv.pairs.clone(), style: Style::Points });
    }
    vec![("b_histogram.svg", hist.render()), ("loglog.svg", loglog.render()), ("predicted_vs_actual.svg", pva.render())]
}

/// Writes the report in `format` under `dir`; returns the files written.
pub fn write_report(r: &Report, format: ReportFormat, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let files: Vec<(&str, String)> = match format {
        ReportFormat::Csv => csv_files(r),
        ReportFormat::Text => vec![("report.txt", text(r))],
        ReportFormat::Svg => svgs(r),
    };
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
