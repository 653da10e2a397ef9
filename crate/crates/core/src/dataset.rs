//! Multi-view dataset container and validation.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// N samples observed jointly across M views, with optional binary labels.
///
/// View `m` is an N×D_m matrix; every view shares the same row count. Labels,
/// when present, are one 0/1 value per sample. Instances are immutable after
/// construction and only built through [`MultiViewDataset::new`], which
/// enforces the invariants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiViewDataset {
    views: Vec<DMatrix<f64>>,
    view_names: Vec<String>,
    labels: Option<Vec<u8>>,
}

impl MultiViewDataset {
    /// Validates raw view matrices (and optional labels) into a dataset.
    ///
    /// Rejects empty views, row-count mismatches, non-finite entries and
    /// labels outside {0,1}; never coerces shapes silently.
    pub fn new(
        views: Vec<DMatrix<f64>>,
        view_names: Vec<String>,
        labels: Option<Vec<u8>>,
    ) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::InvalidData("dataset must contain at least one view".into()));
        }
        if view_names.len() != views.len() {
            return Err(Error::InvalidData(format!(
                "{} view names for {} views",
                view_names.len(),
                views.len()
            )));
        }
        let n = views[0].nrows();
        if n == 0 {
            return Err(Error::InvalidData("empty view: zero rows".into()));
        }
        for (m, v) in views.iter().enumerate() {
            if v.ncols() == 0 {
                return Err(Error::InvalidData(format!("empty view: view {m} has zero columns")));
            }
            if v.nrows() != n {
                return Err(Error::InvalidData(format!(
                    "row-count mismatch: view 0 has {n} rows, view {m} has {}",
                    v.nrows()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidData(format!("non-finite entry in view {m}")));
            }
        }
        if let Some(ref l) = labels {
            if l.len() != n {
                return Err(Error::InvalidData(format!(
                    "label length mismatch: {} labels for {n} samples",
                    l.len()
                )));
            }
            if let Some(bad) = l.iter().find(|&&x| x > 1) {
                return Err(Error::InvalidData(format!("label outside {{0,1}}: {bad}")));
            }
        }
        Ok(Self { views, view_names, labels })
    }

    /// Builds a dataset with default view names `view1..viewM`.
    pub fn with_default_names(views: Vec<DMatrix<f64>>, labels: Option<Vec<u8>>) -> Result<Self> {
        let names = (1..=views.len()).map(|m| format!("view{m}")).collect();
        Self::new(views, names, labels)
    }

    pub fn n_samples(&self) -> usize {
        self.views[0].nrows()
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    pub fn view_dims(&self) -> Vec<usize> {
        self.views.iter().map(|v| v.ncols()).collect()
    }

    pub fn views(&self) -> &[DMatrix<f64>] {
        &self.views
    }

    pub fn view(&self, m: usize) -> &DMatrix<f64> {
        &self.views[m]
    }

    pub fn view_names(&self) -> &[String] {
        &self.view_names
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    /// Labels or an error; inference and evaluation require them.
    pub fn require_labels(&self) -> Result<&[u8]> {
        self.labels
            .as_deref()
            .ok_or_else(|| Error::InvalidData("dataset has no labels but labels are required".into()))
    }

    /// Row-concatenation of all views into one N×(ΣD_m) matrix.
    pub fn concat_views(&self) -> DMatrix<f64> {
        let n = self.n_samples();
        let d_tot: usize = self.view_dims().iter().sum();
        let mut out = DMatrix::zeros(n, d_tot);
        let mut col = 0;
        for v in &self.views {
            out.view_mut((0, col), (n, v.ncols())).copy_from(v);
            col += v.ncols();
        }
        out
    }

    /// New dataset containing the given rows (in the given order).
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        let n = self.n_samples();
        if let Some(&bad) = rows.iter().find(|&&r| r >= n) {
            return Err(Error::ShapeMismatch(format!("row index {bad} out of range for {n} samples")));
        }
        let views = self
            .views
            .iter()
            .map(|v| DMatrix::from_fn(rows.len(), v.ncols(), |i, j| v[(rows[i], j)]))
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| rows.iter().map(|&r| l[r]).collect());
        Self::new(views, self.view_names.clone(), labels)
    }

    /// Copy of this dataset with labels removed.
    pub fn without_labels(&self) -> Self {
        Self {
            views: self.views.clone(),
            view_names: self.view_names.clone(),
            labels: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(n: usize, d: usize, fill: f64) -> DMatrix<f64> {
        DMatrix::from_element(n, d, fill)
    }

    #[test]
    fn accepts_consistent_views_and_labels() {
        let ds = MultiViewDataset::with_default_names(
            vec![mat(5, 3, 1.0), mat(5, 2, 2.0)],
            Some(vec![0, 1, 1, 0, 1]),
        )
        .unwrap();
        assert_eq!(ds.n_samples(), 5);
        assert_eq!(ds.n_views(), 2);
        assert_eq!(ds.view_dims(), vec![3, 2]);
    }

    #[test]
    fn rejects_row_count_mismatch() {
        let err = MultiViewDataset::with_default_names(vec![mat(5, 3, 0.0), mat(4, 2, 0.0)], None)
            .unwrap_err();
        assert!(err.to_string().contains("row-count mismatch"), "{err}");
    }

    #[test]
    fn rejects_bad_labels() {
        let err = MultiViewDataset::with_default_names(vec![mat(3, 2, 0.0)], Some(vec![0, 2, 1]))
            .unwrap_err();
        assert!(err.to_string().contains("label outside {0,1}"), "{err}");

        let err = MultiViewDataset::with_default_names(vec![mat(3, 2, 0.0)], Some(vec![0, 1]))
            .unwrap_err();
        assert!(err.to_string().contains("label length mismatch"), "{err}");
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        let mut v = mat(3, 2, 0.0);
        v[(1, 1)] = f64::NAN;
        let err = MultiViewDataset::with_default_names(vec![v], None).unwrap_err();
        assert!(err.to_string().contains("non-finite"), "{err}");

        let err =
            MultiViewDataset::with_default_names(vec![DMatrix::zeros(3, 0)], None).unwrap_err();
        assert!(err.to_string().contains("empty view"), "{err}");

        assert!(MultiViewDataset::with_default_names(vec![], None).is_err());
    }

    #[test]
    fn subset_and_concat() {
        let v1 = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let v2 = DMatrix::from_row_slice(3, 1, &[10.0, 20.0, 30.0]);
        let ds = MultiViewDataset::with_default_names(vec![v1, v2], Some(vec![1, 0, 1])).unwrap();
        let sub = ds.subset(&[2, 0]).unwrap();
        assert_eq!(sub.n_samples(), 2);
        assert_eq!(sub.view(0)[(0, 0)], 5.0);
        assert_eq!(sub.labels().unwrap(), &[1, 1]);

        let cat = ds.concat_views();
        assert_eq!(cat.ncols(), 3);
        assert_eq!(cat[(1, 2)], 20.0);
    }
}
