//! Accuracy bookkeeping in the shape of a system comparison table and a
//! per-vowel breakdown of the fused decision.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::decision::VerificationOutcome;
use crate::error::{Error, Result};
use crate::vowel::Vowel;

/// Nearest-speaker picks for one test utterance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub true_speaker: String,
    pub vowel: Vowel,
    pub cepstral_pick: String,
    pub temporal_pick: String,
}

impl TrialOutcome {
    pub fn combined(&self) -> VerificationOutcome {
        if self.cepstral_pick == self.temporal_pick {
            VerificationOutcome::Accepted(self.cepstral_pick.clone())
        } else {
            VerificationOutcome::Rejected
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    Cepstral,
    Temporal,
    Combined,
}

impl System {
    pub const ALL: [System; 3] = [System::Cepstral, System::Temporal, System::Combined];

    pub fn label(self) -> &'static str {
        match self {
            System::Cepstral => "cepstral",
            System::Temporal => "temporal",
            System::Combined => "combined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub total: usize,
    pub rejected: usize,
    pub correct: usize,
    pub wrong: usize,
}

impl Tally {
    pub fn accepted(&self) -> usize {
        self.correct + self.wrong
    }

    /// Correct fraction of accepted trials, `None` when nothing was accepted.
    pub fn accuracy(&self) -> Option<f64> {
        let a = self.accepted();
        (a > 0).then(|| self.correct as f64 / a as f64)
    }

    pub fn accuracy_pct(&self) -> Option<f64> {
        self.accuracy().map(|a| 100.0 * a)
    }

    fn record(&mut self, outcome: Option<bool>) {
        self.total += 1;
        match outcome {
            None => self.rejected += 1,
            Some(true) => self.correct += 1,
            Some(false) => self.wrong += 1,
        }
    }
}

pub const UNDEFINED_MARKER: &str = "n/a";

fn fmt_pct(p: Option<f64>) -> String {
    p.map_or_else(|| UNDEFINED_MARKER.to_string(), |p| format!("{p:.2}"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub systems: Vec<(System, Tally)>,
    /// Fused-decision tallies per vowel, in vowel order; vowels without trials
    /// are omitted.
    pub vowels: Vec<(Vowel, Tally)>,
    pub trials: Vec<TrialOutcome>,
    /// Test files the pipeline could not process, with the reason.
    pub failures: Vec<(String, String)>,
}

impl EvalReport {
    pub fn from_trials(trials: Vec<TrialOutcome>) -> Self {
        let mut cep = Tally::default();
        let mut tem = Tally::default();
        let mut comb = Tally::default();
        let mut per_vowel: Vec<(Vowel, Tally)> =
            Vowel::ALL.iter().map(|&v| (v, Tally::default())).collect();
        for t in &trials {
            cep.record(Some(t.cepstral_pick == t.true_speaker));
            tem.record(Some(t.temporal_pick == t.true_speaker));
            let fused = t.combined().speaker().map(|s| s == t.true_speaker);
            comb.record(fused);
            per_vowel
                .iter_mut()
                .find(|(v, _)| *v == t.vowel)
                .unwrap()
                .1
                .record(fused);
        }
        per_vowel.retain(|(_, t)| t.total > 0);
        Self {
            systems: vec![
                (System::Cepstral, cep),
                (System::Temporal, tem),
                (System::Combined, comb),
            ],
            vowels: per_vowel,
            trials,
            failures: Vec::new(),
        }
    }

    pub fn system(&self, system: System) -> Tally {
        self.systems
            .iter()
            .find(|(s, _)| *s == system)
            .map(|(_, t)| *t)
            .unwrap_or_default()
    }

    pub fn vowel(&self, vowel: Vowel) -> Option<Tally> {
        self.vowels
            .iter()
            .find(|(v, _)| *v == vowel)
            .map(|(_, t)| *t)
    }

    /// One CSV covering both tables:
    /// `section,name,total,accepted,rejected,correct,wrong,accuracy_pct`.
    pub fn summary_csv(&self) -> String {
        let mut out =
            String::from("section,name,total,accepted,rejected,correct,wrong,accuracy_pct\n");
        let rows = self
            .systems
            .iter()
            .map(|(s, t)| ("system", s.label().to_string(), t))
            .chain(self.vowels.iter().map(|(v, t)| ("vowel", v.to_string(), t)));
        for (section, name, t) in rows {
            writeln!(
                out,
                "{section},{name},{},{},{},{},{},{}",
                t.total,
                t.accepted(),
                t.rejected,
                t.correct,
                t.wrong,
                fmt_pct(t.accuracy_pct())
            )
            .unwrap();
        }
        out
    }

    pub fn trials_csv(&self) -> String {
        let mut out = String::from("true_speaker,vowel,cepstral_pick,temporal_pick,combined\n");
        for t in &self.trials {
            let combined = t.combined().speaker().unwrap_or("rejected").to_string();
            writeln!(
                out,
                "{},{},{},{},{}",
                t.true_speaker, t.vowel, t.cepstral_pick, t.temporal_pick, combined
            )
            .unwrap();
        }
        out
    }

    /// Aligned text versions of the system and per-vowel tables.
    pub fn render_tables(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<10} {:>6} {:>9} {:>8} {:>8} {:>6} {:>9}",
            "system", "total", "accepted", "rejected", "correct", "wrong", "accuracy"
        )
        .unwrap();
        for (s, t) in &self.systems {
            writeln!(
                out,
                "{:<10} {:>6} {:>9} {:>8} {:>8} {:>6} {:>9}",
                s.label(),
                t.total,
                t.accepted(),
                t.rejected,
                t.correct,
                t.wrong,
                pct_cell(t.accuracy_pct())
            )
            .unwrap();
        }
        out.push('\n');
        writeln!(
            out,
            "{:<6} {:>6} {:>8} {:>8} {:>6} {:>9}",
            "vowel", "total", "rejected", "correct", "wrong", "accuracy"
        )
        .unwrap();
        for (v, t) in &self.vowels {
            writeln!(
                out,
                "{:<6} {:>6} {:>8} {:>8} {:>6} {:>9}",
                format!("/{v}/"),
                t.total,
                t.rejected,
                t.correct,
                t.wrong,
                pct_cell(t.accuracy_pct())
            )
            .unwrap();
        }
        if !self.failures.is_empty() {
            writeln!(
                out,
                "\n{} test file(s) could not be processed",
                self.failures.len()
            )
            .unwrap();
        }
        out
    }

    /// Writes `report.csv`, `trials.csv` and `tables.txt` into `dir`.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, body) in [
            ("report.csv", self.summary_csv()),
            ("trials.csv", self.trials_csv()),
            ("tables.txt", self.render_tables()),
        ] {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        }
        if !self.failures.is_empty() {
            let p = dir.join("failures.txt");
            let body: String = self
                .failures
                .iter()
                .map(|(f, e)| format!("{f}\t{e}\n"))
                .collect();
            fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        }
        Ok(())
    }
}

fn pct_cell(p: Option<f64>) -> String {
    p.map_or_else(|| UNDEFINED_MARKER.to_string(), |p| format!("{p:.2}%"))
}
