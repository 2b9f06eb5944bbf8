# -*- coding: utf-8 -*-
from src.common.consts import directories  # noqa: F401
from src.common.consts import logger  # noqa: F401
