#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import sys

from gnflow.cli.main import main

sys.exit(main())
