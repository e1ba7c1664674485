//! JSON interchange for signals, observations, spectra and root sets.
//!
//! A signal on `[−n, n]` is `{"n", "sigma", "re", "im"}` with arrays of length
//! `2n + 1` indexed `t = −n..n`; spectra add `"domain": "spectrum"` and are
//! indexed `k = 0..2n`. Root sets are `{"roots": [{"re", "im", "mult"}]}`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{ObservationWindow, Root, SisSpec, TwoSidedSequence};
use crate::spectral::SpectrumVec;
use crate::Complex64;

pub const SPECTRUM_DOMAIN: &str = "spectrum";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalJson {
    pub n: usize,
    #[serde(default)]
    pub sigma: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
}

impl SignalJson {
    /// Samples `x` on `[−n, n]`.
    pub fn from_sequence(x: &TwoSidedSequence, n: usize, sigma: f64) -> Self {
        let values = x.window(-(n as i64), n as i64).into_values();
        Self {
            n,
            sigma,
            re: values.iter().map(|v| v.re).collect(),
            im: values.iter().map(|v| v.im).collect(),
            domain: None,
        }
    }

    pub fn from_spectrum(a: &SpectrumVec) -> Self {
        Self {
            n: a.n(),
            sigma: 0.0,
            re: a.values().iter().map(|v| v.re).collect(),
            im: a.values().iter().map(|v| v.im).collect(),
            domain: Some(SPECTRUM_DOMAIN.to_string()),
        }
    }

    fn values(&self) -> Result<Vec<Complex64>> {
        let len = 2 * self.n + 1;
        if self.re.len() != len || self.im.len() != len {
            return Err(Error::invalid(format!(
                "expected re/im arrays of length {len}, got {} and {}",
                self.re.len(),
                self.im.len()
            )));
        }
        Ok(self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)).collect())
    }

    pub fn is_spectrum(&self) -> bool {
        self.domain.as_deref() == Some(SPECTRUM_DOMAIN)
    }

    pub fn to_sequence(&self) -> Result<TwoSidedSequence> {
        if self.is_spectrum() {
            return Err(Error::invalid("expected a time-domain signal, got a spectrum"));
        }
        Ok(TwoSidedSequence::new(-(self.n as i64), self.values()?))
    }

    pub fn to_observation(&self) -> Result<ObservationWindow> {
        ObservationWindow::new(self.to_sequence()?, self.n, self.sigma)
    }

    pub fn to_spectrum(&self) -> Result<SpectrumVec> {
        if !self.is_spectrum() {
            return Err(Error::invalid("expected \"domain\": \"spectrum\""));
        }
        SpectrumVec::new(self.n, self.values()?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootJson {
    pub re: f64,
    pub im: f64,
    pub mult: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecJson {
    pub roots: Vec<RootJson>,
}

impl SpecJson {
    pub fn to_spec(&self) -> Result<SisSpec> {
        SisSpec::new(
            self.roots
                .iter()
                .map(|r| Root::new(Complex64::new(r.re, r.im), r.mult))
                .collect(),
        )
    }
}

impl From<&SisSpec> for SpecJson {
    fn from(spec: &SisSpec) -> Self {
        Self {
            roots: spec
                .roots()
                .iter()
                .map(|r| RootJson {
                    re: r.w.re,
                    im: r.w.im,
                    mult: r.mult,
                })
                .collect(),
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_reader(BufReader::new(file)).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    serde_json::to_writer_pretty(&mut out, value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    out.write_all(b"\n").map_err(io_err)?;
    out.flush().map_err(io_err)
}
