import os
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent / "paridad_qed"))
os.environ.setdefault("DJANGO_SETTINGS_MODULE", "paridad_qed.settings")

import django  # noqa: E402

django.setup()
