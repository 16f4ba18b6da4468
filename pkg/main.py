import sys

from dotenv import load_dotenv

# 文字エンコーディングの設定
try:
    sys.stdout.reconfigure(encoding='utf-8')
    sys.stderr.reconfigure(encoding='utf-8')
except (AttributeError, TypeError):
    pass

# .envファイルから環境変数を読み込む（FRACTAL_SLICER_*）
load_dotenv()

from modules.cli import run  # noqa: E402


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
