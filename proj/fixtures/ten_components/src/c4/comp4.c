extern bool FA;
extern bool FB;
extern bool FC;
extern bool FD;
extern bool FE;

int sig5 = 0;
extern int sig3;
extern int sig4;

int act3() {
    return 3;
}

int poll3() {
    if (sig3 > 0) {
        act3();
    }
    return 0;
}

int act4() {
    return 4;
}

int poll4() {
    if (FC) {
        if (sig4 > 0) {
            act4();
        }
    }
    return 0;
}

int send5() {
    sig5 = sig5 + 1;
    return 0;
}
