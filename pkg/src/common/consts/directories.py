# -*- coding: utf-8 -*-
from pathlib import Path

ROOT_DIR = Path(__file__).resolve().parents[3]

DATA_DIR = ROOT_DIR / "data"
FIXTURES_DIR = DATA_DIR / "fixtures"
SCENARIOS_DIR = DATA_DIR / "scenarios"
POLICIES_DIR = DATA_DIR / "policies"
DOCS_DIR = ROOT_DIR / "docs"
ENVIRONMENTS_DIR = ROOT_DIR / "environments"
TESTS_DIR = ROOT_DIR / "tests"
SOURCE_DIR = ROOT_DIR / "src"

CANONICAL_FIXTURE = FIXTURES_DIR / "canonical.yaml"
