//! Isometric Euclidean embeddings of snowflaked finite metric spaces.
//!
//! For an n-point subset X of Hilbert space and 0 < α < 1, the snowflake
//! X^α (distances raised to the power α) embeds isometrically into E^(n−1),
//! and the embedded points are always in general position: X^α does not fit
//! into E^(n−2). This crate computes those embeddings, certifies the rank,
//! and extends the construction to quotients E^m/G by finite groups of
//! orthogonal maps, embedding snowflakes of finite subsets of E^m/G into the
//! canonical quotient Q(n, G).
//!
//! | module | contents |
//! |---|---|
//! | [`metric`] | validated metric spaces, point clouds, the snowflake transform |
//! | [`negative_type`] | the forms ΛDΛᵀ, negative-type and general-position certificates |
//! | [`embedding`] | double-centering embeddings with rank certification |
//! | [`schoenberg`] | the Gaussian integral representation of t^(2a) and kernel positivity |
//! | [`group`] | finite groups from orthogonal generators |
//! | [`quotient`] | orbit lifts, regular permutations and the Q(n, G) embedding |
//!
//! ```
//! use snowflake_embed::{embed, euclidean_metric, snowflake_embed, PointCloud, SnowflakeExponent};
//!
//! // three collinear points: the metric itself only needs one dimension ...
//! let line = PointCloud::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
//! let x = euclidean_metric(&line).unwrap();
//! assert_eq!(embed(&x, 1e-9).unwrap().rank, 1);
//!
//! // ... but its square-root snowflake needs all n − 1 = 2
//! let half = SnowflakeExponent::new(0.5).unwrap();
//! let e = snowflake_embed(&x, half, 1e-9).unwrap();
//! assert_eq!(e.rank, 2);
//! assert!(e.residual < 1e-12);
//! ```
//!
//! A longer walk through the theory with runnable examples lives in the
//! `book/` directory of the repository; every snippet there is compiled and
//! run as a doctest of this crate.

pub mod embedding;
pub mod error;
pub mod group;
mod linalg;
pub mod metric;
pub mod negative_type;
pub mod quadrature;
pub mod quotient;
pub mod schoenberg;

pub use embedding::{embed, embedding_residual, gram_from_distances, snowflake_embed, EmbeddingResult};
pub use error::{Error, Result};
pub use group::{close_group, FiniteGroup, OrthogonalAction};
pub use metric::{
    euclidean_metric, snowflake, squared_distance_matrix, validate_metric, FiniteMetricSpace,
    PointCloud, SnowflakeExponent,
};
pub use negative_type::{
    check_negative_type, check_strict_negative_type, general_position_certificate,
    geometric_form_check, quadratic_form, NegativeTypeReport, WeightVector,
};
pub use quotient::{
    equivariance_defect, lift_orbits, qng_embed, quotient_distance, regular_permutation_matrices,
    Permutation, QngEmbedding, QuotientConfiguration,
};
pub use schoenberg::{
    check_kernel_psd, gaussian_kernel_matrix, schoenberg_constant, strict_decomposition_check,
    verify_power_identity, QuadratureSpec,
};

// The README and the guide's chapters, compiled as doctests so they never drift from
// the code.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/negative_type.md")]
    mod negative_type {}
    #[doc = include_str!("../../../book/src/embedding.md")]
    mod embedding {}
    #[doc = include_str!("../../../book/src/integral.md")]
    mod integral {}
    #[doc = include_str!("../../../book/src/quotients.md")]
    mod quotients {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
