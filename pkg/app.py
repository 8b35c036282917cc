"""StegoVault command-line entry point.

Usage:
    python app.py keygen --public-key alice.pub --private-key alice.key
    python app.py embed --cover cover.bmp --input secret/ --output stego.bmp \
        --public-key alice.pub --key-file session.svk --key-number 42
    python app.py extract --stego stego.bmp --output out/ \
        --private-key alice.key --key-file session.svk --key-number 42
"""

from src.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
