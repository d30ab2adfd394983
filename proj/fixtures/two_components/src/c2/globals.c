int GlobVar = 0; // shared global
extern bool FB; // Feature variable

int foo() {
    int r = 0;
    if (FB) {
        return GlobVar;
    }
    return r;
}
int bar() {
    int r = 0;
    if (GlobVar > 20) {
        return foo();
    }
    return r;
}
