"""ebus3d - residual 3D video networks for benign/malignant EBUS lesion classification."""

# Version information
__version__ = "0.1.0"
__description__ = "EBUS video classification with 3D residual encoders and multimodal fusion"

from .core import Ebus3dError, GraphicSignal, Label, Mode, Split, Variant
from .nets import build_model, describe_model_shapes, load_checkpoint, save_checkpoint
from .preproc import preprocess_dataset
from .synth import SynthConfig, generate_dataset
from .training import TrainSettings, evaluate, train

__all__ = [
    # Version info
    "__version__",
    "__description__",
    # Core
    "Ebus3dError",
    "GraphicSignal",
    "Label",
    "Mode",
    "Split",
    "Variant",
    # Models
    "build_model",
    "describe_model_shapes",
    "load_checkpoint",
    "save_checkpoint",
    # Pipeline
    "preprocess_dataset",
    "SynthConfig",
    "generate_dataset",
    "TrainSettings",
    "evaluate",
    "train",
]
