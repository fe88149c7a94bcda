"""
테스트 모듈

필요한 테스트 파일만 포함합니다.
"""

