"""Autocorrelation-corrected tests of linear dependence between time series.

Modified t/F tests for (partial) correlation, Gaussian mutual
information, and Granger causality, each referred to a Monte-Carlo null
built from per-term effective degrees of freedom, together with a
simulation harness for false-positive-rate experiments.
"""

from .errors import (ConfigError, DegenerateSeriesError, FitFailedError,
                     IllConditionedError, IngestionError,
                     InsufficientEffectiveSamplesError, LindepError)
from .ts_core import (AcfEstimate, Partition, TaperSpec, TimeSeriesMatrix,
                      demean, lag_embed, load_csv, sample_autocorrelation,
                      sample_cross_covariance)
from .ess import EssEstimate, bartlett_variance, effective_dof, effective_sample_size
from .nulldist import (LambdaStarNull, NullFamily, TestVerdict, beta_sample,
                       chi2_cdf, f_cdf, lambda_star_build, lambda_star_pvalue,
                       regularized_incomplete_beta, t_cdf)
from .linreg import (ArModel, ArmaModel, OrthonormalBasis, ResidualSet,
                     arma_fit, burg_fit, generalized_variance_logdet,
                     information_criteria, ols_residuals,
                     partial_autocorrelation, partial_correlation)
from .measures import (ChainTerm, DependenceResult, active_information_storage,
                       ais_embedding_select, classical_tests,
                       granger_causality, granger_causality_direct,
                       mi_gaussian, mi_gaussian_direct,
                       partial_corr_test_modified, pearson_test_modified)
from .simulate import (FilterSpec, VarSpec, bandpass_design,
                       butterworth_design, filter_apply, fir_ls_design,
                       prewhiten, var_simulate)
from .harness import (ExperimentConfig, ExperimentReport, ingest_and_test,
                      run_experiment, sweep)

__version__ = "0.1.0"
