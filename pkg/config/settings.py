"""
Configuration settings for the profile solver and the verification suites
"""
import math
import os
import sys
from dotenv import load_dotenv

load_dotenv()

VERSION = '0.3.1'


class Settings:
    """Numerical settings from environment variables"""

    # Profile ODE (W-formulation, integrated backward from r=1)
    PROFILE_REL_TOL: float = float(os.getenv('PROFILE_REL_TOL', '1e-10'))
    PROFILE_ABS_TOL: float = float(os.getenv('PROFILE_ABS_TOL', '1e-12'))
    PROFILE_METHOD: str = os.getenv('PROFILE_METHOD', 'RK45')
    PROFILE_MAX_STEP: float = float(os.getenv('PROFILE_MAX_STEP', 'inf'))
    PROFILE_POINTS: int = int(os.getenv('PROFILE_POINTS', '1001'))

    # Tighter profile used under m-dimensional Hessians (FD amplifies interpolation noise)
    MA_PROFILE_REL_TOL: float = float(os.getenv('MA_PROFILE_REL_TOL', '1e-12'))
    MA_PROFILE_ABS_TOL: float = float(os.getenv('MA_PROFILE_ABS_TOL', '1e-14'))

    # Finite differences
    FD_STEP: float = float(os.getenv('FD_STEP', '1e-3'))
    HESSIAN_STEP: float = float(os.getenv('HESSIAN_STEP', '5e-3'))
    RICCI_STEP: float = float(os.getenv('RICCI_STEP', '2e-2'))
    RICCI_INNER_STEP: float = float(os.getenv('RICCI_INNER_STEP', '1e-2'))

    # Sampling
    RNG_SEED: int = int(os.getenv('RNG_SEED', '20240501'))
    SAMPLE_POINTS: int = int(os.getenv('SAMPLE_POINTS', '20'))
    NORMAL_POINTS: int = int(os.getenv('NORMAL_POINTS', '10'))
    GRIFFITHS_TRIALS: int = int(os.getenv('GRIFFITHS_TRIALS', '64'))
    THREADS: int = int(os.getenv('THREADS', '1'))

    # Acceptance thresholds
    ODE_RESIDUAL_TOLERANCE: float = float(os.getenv('ODE_RESIDUAL_TOLERANCE', '1e-8'))
    MA_TOLERANCE: float = float(os.getenv('MA_TOLERANCE', '1e-5'))
    IDENTITY_TOLERANCE: float = float(os.getenv('IDENTITY_TOLERANCE', '1e-6'))
    BLOCK_TOLERANCE: float = float(os.getenv('BLOCK_TOLERANCE', '1e-5'))
    RICCI_TOLERANCE: float = float(os.getenv('RICCI_TOLERANCE', '1e-4'))
    SPLIT_TOLERANCE: float = float(os.getenv('SPLIT_TOLERANCE', '1e-6'))
    LOWER_BOUND_TOLERANCE: float = float(os.getenv('LOWER_BOUND_TOLERANCE', '1e-8'))
    BERGMAN_TOLERANCE: float = float(os.getenv('BERGMAN_TOLERANCE', '1e-8'))

    # Output & Logging
    OUTPUT_DIR: str = os.getenv('OUTPUT_DIR', './reports')
    LOG_LEVEL: str = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FILE_PATH: str = os.getenv('LOG_FILE_PATH', '')

    @classmethod
    def validate(cls) -> bool:
        """Validate configuration"""
        errors = []

        positive = [
            'PROFILE_REL_TOL', 'PROFILE_ABS_TOL', 'PROFILE_MAX_STEP',
            'MA_PROFILE_REL_TOL', 'MA_PROFILE_ABS_TOL',
            'FD_STEP', 'HESSIAN_STEP', 'RICCI_STEP', 'RICCI_INNER_STEP',
            'ODE_RESIDUAL_TOLERANCE', 'MA_TOLERANCE', 'IDENTITY_TOLERANCE',
            'BLOCK_TOLERANCE', 'RICCI_TOLERANCE', 'SPLIT_TOLERANCE',
            'LOWER_BOUND_TOLERANCE', 'BERGMAN_TOLERANCE',
        ]
        for name in positive:
            value = getattr(cls, name)
            if math.isnan(value) or value <= 0:
                errors.append(f"{name} must be positive (got {value})")

        if cls.PROFILE_METHOD not in ('RK45', 'DOP853'):
            errors.append(f"PROFILE_METHOD must be RK45 or DOP853 (got {cls.PROFILE_METHOD})")
        if cls.PROFILE_POINTS < 2:
            errors.append("PROFILE_POINTS must be at least 2")
        if cls.THREADS < 1:
            errors.append("THREADS must be at least 1")
        if cls.GRIFFITHS_TRIALS < 1:
            errors.append("GRIFFITHS_TRIALS must be at least 1")

        if errors:
            for error in errors:
                print(f"❌ Configuration Error: {error}", file=sys.stderr)
            return False

        return True

    @classmethod
    def as_dict(cls) -> dict:
        """Snapshot of every setting, embedded in reports"""
        return {
            name: getattr(cls, name)
            for name in sorted(vars(cls))
            if name.isupper()
        }

    @classmethod
    def print_config(cls):
        """Print current configuration"""
        print("\n" + "=" * 60, file=sys.stderr)
        print(f"📐 KAHLER-EINSTEIN BALL BUNDLES v{VERSION} - CONFIGURATION", file=sys.stderr)
        print("=" * 60, file=sys.stderr)
        print(f"Profile solver: {cls.PROFILE_METHOD} rtol={cls.PROFILE_REL_TOL:g} atol={cls.PROFILE_ABS_TOL:g}", file=sys.stderr)
        print(f"Verification profile: rtol={cls.MA_PROFILE_REL_TOL:g} atol={cls.MA_PROFILE_ABS_TOL:g}", file=sys.stderr)
        print(f"FD steps: bundle={cls.FD_STEP:g} hessian={cls.HESSIAN_STEP:g}·margin "
              f"ricci={cls.RICCI_STEP:g}·margin (inner {cls.RICCI_INNER_STEP:g})", file=sys.stderr)
        print(f"Seed: {cls.RNG_SEED}  Points: {cls.SAMPLE_POINTS}  Threads: {cls.THREADS}", file=sys.stderr)
        print(f"Output: {cls.OUTPUT_DIR}", file=sys.stderr)
        print("=" * 60 + "\n", file=sys.stderr)


# Global settings instance
settings = Settings()
