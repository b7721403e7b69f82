"""lamtransfer - anticyclotomic lambda-invariant transfer between congruent modular forms"""

__version__ = "0.1.0"
__license__ = "MIT"

from .curves import EllipticCurveQ, conductor, local_data, trace_of_frobenius
from .quadfield import ImagQuadField, brink_s_ell, class_number, splitting_type
from .congruence import check_congruence, sturm_bound
from .iwasawa import HypothesisCertificate, local_lambda, transfer_lambda
from .records import load_fixture, load_record
from .pipeline import RunConfig, run_command

__all__ = [
    "EllipticCurveQ",
    "conductor",
    "local_data",
    "trace_of_frobenius",
    "ImagQuadField",
    "brink_s_ell",
    "class_number",
    "splitting_type",
    "check_congruence",
    "sturm_bound",
    "HypothesisCertificate",
    "local_lambda",
    "transfer_lambda",
    "load_fixture",
    "load_record",
    "RunConfig",
    "run_command",
]
