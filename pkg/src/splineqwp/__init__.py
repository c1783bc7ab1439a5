"""Spline-based quasi-analytic wavelet packets.

Periodic 1D wavelet-packet transforms built from polynomial splines, their
Hilbert-transformed complements, quasi-analytic combinations of the two,
and a dual-tree 2D transform with directional waveforms. All filtering is
done with the FFT.
"""

from .atlas import (LdvmReport, Waveform, Waveform2D, direction_census, gen_waveform,
                    gen_waveform2d, gen_waveform_synthesis, ldvm_verify, modulation_error,
                    packet_spectrum, spectral_center)
from .containers import (Container2D, ContainerError, CropRecord, load_qwp1, load_qwp2,
                         save_qwp1, save_qwp2)
from .filterbank import (HalfBandPair, Kind, ModMatSet, analyze_one_level, filter_responses,
                         get_tables, modmat, synthesize_one_level)
from .imaging import MetricsReport, extend_symmetric, psnr, read_image, write_image
from .jobs import JobConfig, run_bench, run_denoise
from .splines import SplineTables, build_tables, eval_bspline, spline_u, spline_v
from .wpt1d import (AnalyticSignal, CoeffTree1D, analytic_signal, frame_reconstruct, hilbert,
                    level_cover, wavelet_cover, wpt_forward, wpt_inverse)
from .wpt2d import (QwpCoeffs2D, Reconstruction2D, level_cover2d, qwpt2_forward,
                    qwpt2_inverse, threshold_coeffs, wavelet_cover2d)

__version__ = "0.1.0"
