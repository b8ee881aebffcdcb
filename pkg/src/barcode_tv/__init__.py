"""Bar code restoration with anisotropic total variation and L1 fidelity."""

__version__ = "0.1.0"

from .barcode import Barcode, BarcodeSpec, generate, is_in_B_omega, x_dimension
from .certificate import CertificateReport, VectorField, build_certificate, verify_certificate
from .degrade import HatKernel, NoiseSpec, add_gaussian_noise, convolution_matrix, convolve_same, hat_kernel, snr_db
from .functional import aniso_tv, divergence, f1_value, f2_value, f3_value, forward_diff_matrices, iso_tv
from .grid import BinaryImage, GridImage, pad, read_pgm, threshold, write_pgm
from .lp import StandardLp, brute_force_binary, build_f1_lp, build_f2_lp, build_f3_lp, solve
from .restore import RestoreReport, deblur_f3, denoise_f1, denoise_f2, pixel_error, sweep_lambda
