"""Covert channels in SIP/SDP VoIP signalling.

Embed and extract payloads in SIP/SDP messages, account for per-call covert
capacity, and scan traffic for the marks the channels leave.
"""

from .analyzer import Finding, ScanConfig, ScanReport, scan_flow, scan_message
from .bits import BitString, deframe_payload, frame_payload, lehmer_decode, lehmer_encode
from .callflow import CallScenario, default_scenario, flow_capacity, flow_embed, flow_extract, smime_scenario
from .capacity import CapacityReport, compute_total, measured_scenario, paper_scenario
from .channels import CHANNEL_IDS, ChannelConfig, channel_capacity, embed, extract
from .errors import *  # noqa: F401,F403
from .message import SipMessage, canonicalize, find_header, parse_message, serialize_message

__version__ = "0.1.0"
