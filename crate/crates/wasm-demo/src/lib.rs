//! WebAssembly bindings for the browser demo in `www/`.
//!
//! The page generates a dataset (or takes a pasted CSV), clusters it, draws
//! the decision graph and lets the user cut it: automatically, by cluster
//! count, or by clicking individual connections.

pub mod session;

use wasm_bindgen::prelude::*;

pub use session::{demo_blobs, CutView, DemoSession};

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable view")
}

#[wasm_bindgen]
pub struct Demo {
    inner: DemoSession,
}

#[wasm_bindgen]
impl Demo {
    /// Generates `groups` blobs from `seed` and clusters them.
    #[wasm_bindgen(constructor)]
    pub fn new(groups: u32, seed: u32) -> Result<Demo, JsError> {
        let inner = DemoSession::generate(groups as usize, u64::from(seed)).map_err(js_err)?;
        Ok(Demo { inner })
    }

    /// Clusters pasted CSV rows. A negative `label_col` means no labels.
    #[wasm_bindgen(js_name = fromCsv)]
    pub fn from_csv(text: &str, label_col: i32) -> Result<Demo, JsError> {
        let col = usize::try_from(label_col).ok();
        let inner = DemoSession::from_csv(text, col).map_err(js_err)?;
        Ok(Demo { inner })
    }

    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.inner.n()
    }

    #[wasm_bindgen(getter)]
    pub fn rounds(&self) -> Vec<u32> {
        self.inner.result().rounds.iter().map(|&r| r as u32).collect()
    }

    /// Connection records as a JSON array, same fields as the graph file.
    pub fn graph(&self) -> String {
        to_json(&self.inner.records())
    }

    /// x0, y0, x1, y1, ... for the scatter plot.
    pub fn coordinates(&self) -> Vec<f64> {
        self.inner.coordinates()
    }

    /// Current partition as JSON: k, sizes, removed, labels, warnings.
    pub fn partition(&self) -> String {
        to_json(&self.inner.view())
    }

    #[wasm_bindgen(js_name = cutAuto)]
    pub fn cut_auto(&mut self) -> String {
        to_json(&self.inner.cut_auto())
    }

    #[wasm_bindgen(js_name = cutTopk)]
    pub fn cut_topk(&mut self, k: u32) -> Result<String, JsError> {
        self.inner.cut_topk(k as usize).map(|v| to_json(&v)).map_err(js_err)
    }

    pub fn clear(&mut self) -> String {
        to_json(&self.inner.clear())
    }

    pub fn toggle(&mut self, id: u32) -> Result<String, JsError> {
        self.inner.toggle(id as usize).map(|v| to_json(&v)).map_err(js_err)
    }

    /// NMI against the generating labels, or NaN when there are none.
    pub fn nmi(&self) -> f64 {
        self.inner.nmi().unwrap_or(f64::NAN)
    }
}
