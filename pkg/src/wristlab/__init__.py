"""wristlab: control suite for a desk-scale two-axis wrist rehabilitation
station.

The station moves a relaxed wrist through dorsal-palmar and cubital-radial
arcs. This package provides the device model and unit transforms, routine
recording/storage/playback, the kinematic and torque analysis used to size
the steppers, a latching safety state machine, a deterministic simulated
plant, and a newline-delimited JSON command/telemetry service with TCP and
WebSocket bindings.
"""

from .analysis import (
    AnalysisReport,
    KinematicProfile,
    TorqueProfile,
    analyze,
    differentiate,
    inverse_dynamics,
    motor_adequacy,
)
from .controller import Controller, ControllerConfig, RoutineLibrary, run_script
from .errors import (
    LibraryError,
    MonotonicityError,
    NonUniformGridError,
    NotPlayableError,
    RoutineFormatError,
    SensorRangeError,
    WristlabError,
)
from .model import (
    AdcCalibration,
    DeviceParams,
    JointPose,
    MotorSpec,
    adc_to_angle,
    angle_to_adc,
    angle_to_steps,
    gravity_torque,
    joint_to_motor,
    motor_to_joint,
    static_min_motor_torque,
    steps_to_angle,
)
from .safety import (
    ControllerState,
    Event,
    Mode,
    Rejected,
    RomViolation,
    SafetyEnvelope,
    ValidationResult,
    check_pose,
    clamp_pose,
    scan_rom,
    transition,
    validate_routine,
)
from .sim import HardwarePort, SensorReading, SimConfig, SimulatedPlant
from .trajectory import (
    Routine,
    RoutineSample,
    append_sample,
    generate_demo,
    parse,
    resample,
    sample_at,
    serialize,
    smooth,
)

__version__ = "0.1.0"
